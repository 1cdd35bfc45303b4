use pcl_image::Grid;

use crate::{check_shapes, GradientField, LossError, Result, SmoothingEps};

#[inline]
fn charbonnier(r: f64, eps: f64) -> f64 {
    if eps == 0.0 {
        r.abs()
    } else {
        (r * r + eps * eps).sqrt() - eps
    }
}

#[inline]
fn charbonnier_deriv(r: f64, eps: f64) -> f64 {
    if eps == 0.0 {
        // sign subgradient, 0 at ties
        if r > 0.0 {
            1.0
        } else if r < 0.0 {
            -1.0
        } else {
            0.0
        }
    } else {
        r / (r * r + eps * eps).sqrt()
    }
}

/// Mean absolute pixel difference, averaged over channels. Exact L1.
pub fn content_loss(hr: &impl Grid, sr: &impl Grid) -> Result<f64> {
    content_loss_smoothed(hr, sr, SmoothingEps::EXACT)
}

/// Charbonnier-smoothed content loss; equals [`content_loss`] at eps = 0.
pub fn content_loss_smoothed(hr: &impl Grid, sr: &impl Grid, eps: SmoothingEps) -> Result<f64> {
    let (w, h, c) = check_shapes(hr, sr)?;
    let e = eps.value();
    let sum: f64 = hr
        .samples()
        .iter()
        .zip(sr.samples())
        .map(|(a, b)| charbonnier(a - b, e))
        .sum();
    Ok(sum / (w * h * c) as f64)
}

/// Gradient of the (smoothed) content loss with respect to the SR image.
pub fn content_loss_grad(
    hr: &impl Grid,
    sr: &impl Grid,
    eps: SmoothingEps,
) -> Result<GradientField> {
    let (w, h, c) = check_shapes(hr, sr)?;
    let e = eps.value();
    let norm = 1.0 / (w * h * c) as f64;
    let data: Vec<f64> = hr
        .samples()
        .iter()
        .zip(sr.samples())
        .map(|(a, b)| norm * charbonnier_deriv(b - a, e))
        .collect();
    Ok(GradientField::new(w, h, c, data))
}

fn check_thin(w: usize, h: usize) -> Result<()> {
    // At least one forward difference must exist.
    if w < 2 && h < 2 {
        return Err(LossError::ImageTooThin);
    }
    Ok(())
}

/// Mean absolute difference of horizontal and vertical forward differences.
///
/// Sums |d_x hr - d_x sr| over the (W-1) x H valid grid and |d_y hr - d_y sr|
/// over W x (H-1), normalizes the combined sum by W*H, and averages over
/// channels. Exact L1.
pub fn differential_content_loss(hr: &impl Grid, sr: &impl Grid) -> Result<f64> {
    differential_content_loss_smoothed(hr, sr, SmoothingEps::EXACT)
}

pub fn differential_content_loss_smoothed(
    hr: &impl Grid,
    sr: &impl Grid,
    eps: SmoothingEps,
) -> Result<f64> {
    let (w, h, c) = check_shapes(hr, sr)?;
    check_thin(w, h)?;
    let e = eps.value();
    let n = w * h;
    let mut sum = 0.0;
    for ch in 0..c {
        let a = &hr.samples()[ch * n..(ch + 1) * n];
        let b = &sr.samples()[ch * n..(ch + 1) * n];
        for y in 0..h {
            for x in 0..w.saturating_sub(1) {
                let i = y * w + x;
                let da = a[i + 1] - a[i];
                let db = b[i + 1] - b[i];
                sum += charbonnier(da - db, e);
            }
        }
        for y in 0..h.saturating_sub(1) {
            for x in 0..w {
                let i = y * w + x;
                let da = a[i + w] - a[i];
                let db = b[i + w] - b[i];
                sum += charbonnier(da - db, e);
            }
        }
    }
    Ok(sum / (n * c) as f64)
}

/// Gradient of the (smoothed) differential content loss: the adjoint forward
/// difference (negative divergence) of the per-edge smoothed signs.
pub fn differential_content_loss_grad(
    hr: &impl Grid,
    sr: &impl Grid,
    eps: SmoothingEps,
) -> Result<GradientField> {
    let (w, h, c) = check_shapes(hr, sr)?;
    check_thin(w, h)?;
    let e = eps.value();
    let n = w * h;
    let norm = 1.0 / (n * c) as f64;
    let mut data = vec![0.0; n * c];
    for ch in 0..c {
        let a = &hr.samples()[ch * n..(ch + 1) * n];
        let b = &sr.samples()[ch * n..(ch + 1) * n];
        let g = &mut data[ch * n..(ch + 1) * n];
        for y in 0..h {
            for x in 0..w.saturating_sub(1) {
                let i = y * w + x;
                // residual of the x-edge, differentiated w.r.t. sr
                let r = (b[i + 1] - b[i]) - (a[i + 1] - a[i]);
                let s = norm * charbonnier_deriv(r, e);
                g[i + 1] += s;
                g[i] -= s;
            }
        }
        for y in 0..h.saturating_sub(1) {
            for x in 0..w {
                let i = y * w + x;
                let r = (b[i + w] - b[i]) - (a[i + w] - a[i]);
                let s = norm * charbonnier_deriv(r, e);
                g[i + w] += s;
                g[i] -= s;
            }
        }
    }
    Ok(GradientField::new(w, h, c, data))
}
