use pcl_image::{rgb_to_luma, ChannelMode, EvalProtocol, ImageBuffer, LumaPlane};

use crate::distortion::{psnr_from_rmse, rmse_slices, ssim_slices};
use crate::{niqe, MaScoreProvider, MetricError, NiqeModel, Result};

/// RMSE/PSNR/SSIM/NIQE (plus Ma and perceptual index when a Ma score
/// resolves) for one image pair under the evaluation protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    /// 8-bit intensity units.
    pub rmse: f64,
    /// dB; `f64::INFINITY` for identical inputs.
    pub psnr: f64,
    pub ssim: f64,
    pub niqe: f64,
    pub ma: Option<f64>,
    pub pi: Option<f64>,
}

/// Perceptual index ((10 - ma) + niqe) / 2; lower is better.
pub fn perceptual_index(ma: f64, niqe: f64) -> Result<f64> {
    if !(0.0..=10.0).contains(&ma) {
        return Err(MetricError::MaOutOfRange(ma));
    }
    if niqe.is_nan() || niqe < 0.0 {
        return Err(MetricError::NegativeNiqe(niqe));
    }
    Ok(((10.0 - ma) + niqe) / 2.0)
}

fn crop_checked(plane: &LumaPlane, border: usize) -> Result<LumaPlane> {
    if 2 * border >= plane.width().min(plane.height()) {
        return Err(MetricError::BorderTooLarge(
            border,
            plane.width(),
            plane.height(),
        ));
    }
    Ok(plane.crop_border(border)?)
}

/// Evaluates one (HR, SR) pair: converts to the protocol channel space,
/// discards the protocol border, and computes all metrics. NIQE is computed
/// on the cropped SR luma. `image_id` keys the optional Ma lookup.
pub fn evaluate_pair(
    hr: &ImageBuffer,
    sr: &ImageBuffer,
    protocol: &EvalProtocol,
    model: &NiqeModel,
    ma_provider: Option<&MaScoreProvider>,
    image_id: &str,
) -> Result<MetricReport> {
    if hr.width() != sr.width() || hr.height() != sr.height() {
        return Err(MetricError::ShapeMismatch(
            hr.width(),
            hr.height(),
            sr.width(),
            sr.height(),
        ));
    }
    if hr.channels() != sr.channels() {
        return Err(MetricError::ChannelMismatch(hr.channels(), sr.channels()));
    }

    let to_luma = |img: &ImageBuffer| -> Result<LumaPlane> {
        if img.channels() == 3 {
            Ok(rgb_to_luma(img)?)
        } else {
            Ok(LumaPlane::from_image(img)?)
        }
    };
    let sr_luma = crop_checked(&to_luma(sr)?, protocol.border_discard)?;

    let (rmse, ssim) = match protocol.channel_mode {
        ChannelMode::Luma => {
            let hr_luma = crop_checked(&to_luma(hr)?, protocol.border_discard)?;
            let r = rmse_slices(hr_luma.data(), sr_luma.data());
            let s = ssim_slices(
                hr_luma.data(),
                sr_luma.data(),
                hr_luma.width(),
                hr_luma.height(),
            )?;
            (r, s)
        }
        ChannelMode::Rgb => {
            let hr_c = hr.crop_border(protocol.border_discard)?;
            let sr_c = sr.crop_border(protocol.border_discard)?;
            let r = rmse_slices(hr_c.data(), sr_c.data());
            let mut s = 0.0;
            for c in 0..hr_c.channels() {
                s += ssim_slices(hr_c.plane(c), sr_c.plane(c), hr_c.width(), hr_c.height())?;
            }
            (r, s / hr_c.channels() as f64)
        }
    };

    let niqe_score = niqe(&sr_luma, model)?;
    let ma = ma_provider.and_then(|p| p.score(image_id));
    let pi = ma.map(|m| perceptual_index(m, niqe_score)).transpose()?;

    Ok(MetricReport {
        rmse,
        psnr: psnr_from_rmse(rmse),
        ssim,
        niqe: niqe_score,
        ma,
        pi,
    })
}
