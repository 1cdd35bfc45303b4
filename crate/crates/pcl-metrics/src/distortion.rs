use pcl_image::LumaPlane;

use crate::{MetricError, Result};

fn check_shapes(a: &LumaPlane, b: &LumaPlane) -> Result<()> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(MetricError::ShapeMismatch(
            a.width(),
            a.height(),
            b.width(),
            b.height(),
        ));
    }
    Ok(())
}

/// Root mean squared error on the 8-bit intensity scale.
pub fn rmse(hr: &LumaPlane, sr: &LumaPlane) -> Result<f64> {
    check_shapes(hr, sr)?;
    Ok(rmse_slices(hr.data(), sr.data()))
}

pub(crate) fn rmse_slices(a: &[f64], b: &[f64]) -> f64 {
    let sum: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| {
            let d = 255.0 * (x - y);
            d * d
        })
        .sum();
    (sum / a.len() as f64).sqrt()
}

/// Peak signal-to-noise ratio in dB; `f64::INFINITY` for identical inputs.
pub fn psnr(hr: &LumaPlane, sr: &LumaPlane) -> Result<f64> {
    let r = rmse(hr, sr)?;
    Ok(psnr_from_rmse(r))
}

pub(crate) fn psnr_from_rmse(rmse: f64) -> f64 {
    if rmse == 0.0 {
        f64::INFINITY
    } else {
        20.0 * (255.0 / rmse).log10()
    }
}

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;
const SSIM_L: f64 = 255.0;

fn gaussian_window() -> [f64; SSIM_WINDOW] {
    let mut w = [0.0; SSIM_WINDOW];
    let c = (SSIM_WINDOW / 2) as f64;
    let mut sum = 0.0;
    for (i, wi) in w.iter_mut().enumerate() {
        let d = i as f64 - c;
        *wi = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
        sum += *wi;
    }
    for wi in &mut w {
        *wi /= sum;
    }
    w
}

/// Valid-region separable convolution with the normalized window.
/// Output is (w - 10) x (h - 10).
fn filter_valid(src: &[f64], w: usize, h: usize, win: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let ow = w - SSIM_WINDOW + 1;
    let mut horiz = vec![0.0; ow * h];
    for y in 0..h {
        for x in 0..ow {
            let mut acc = 0.0;
            for (k, wk) in win.iter().enumerate() {
                acc += wk * src[y * w + x + k];
            }
            horiz[y * ow + x] = acc;
        }
    }
    let oh = h - SSIM_WINDOW + 1;
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            let mut acc = 0.0;
            for (k, wk) in win.iter().enumerate() {
                acc += wk * horiz[(y + k) * ow + x];
            }
            out[y * ow + x] = acc;
        }
    }
    out
}

/// Mean local structural similarity with the 11x11 Gaussian window
/// (sigma 1.5), K1 = 0.01, K2 = 0.03, dynamic range 255, valid-region
/// windowing.
pub fn ssim(hr: &LumaPlane, sr: &LumaPlane) -> Result<f64> {
    check_shapes(hr, sr)?;
    ssim_slices(hr.data(), sr.data(), hr.width(), hr.height())
}

pub(crate) fn ssim_slices(a01: &[f64], b01: &[f64], w: usize, h: usize) -> Result<f64> {
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(MetricError::ImageTooSmallForSsim(w, h));
    }
    let x: Vec<f64> = a01.iter().map(|v| v * SSIM_L).collect();
    let y: Vec<f64> = b01.iter().map(|v| v * SSIM_L).collect();
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a * b).collect();

    let win = gaussian_window();
    let mu_x = filter_valid(&x, w, h, &win);
    let mu_y = filter_valid(&y, w, h, &win);
    let e_xx = filter_valid(&xx, w, h, &win);
    let e_yy = filter_valid(&yy, w, h, &win);
    let e_xy = filter_valid(&xy, w, h, &win);

    let c1 = (SSIM_K1 * SSIM_L) * (SSIM_K1 * SSIM_L);
    let c2 = (SSIM_K2 * SSIM_L) * (SSIM_K2 * SSIM_L);

    let mut sum = 0.0;
    for i in 0..mu_x.len() {
        let mx = mu_x[i];
        let my = mu_y[i];
        let sx = e_xx[i] - mx * mx;
        let sy = e_yy[i] - my * my;
        let sxy = e_xy[i] - mx * my;
        sum +=
            ((2.0 * mx * my + c1) * (2.0 * sxy + c2)) / ((mx * mx + my * my + c1) * (sx + sy + c2));
    }
    Ok(sum / mu_x.len() as f64)
}
