use crate::{ImageBuffer, ImageError, Result};

/// Cubic convolution kernel with a = -0.5 (Keys), support [-2, 2].
pub fn cubic_kernel(x: f64) -> f64 {
    let a = x.abs();
    if a <= 1.0 {
        (1.5 * a - 2.5) * a * a + 1.0
    } else if a < 2.0 {
        ((-0.5 * a + 2.5) * a - 4.0) * a + 2.0
    } else {
        0.0
    }
}

/// Per-axis resampling plan: for each output index, a fixed set of clamped
/// source indices and normalized weights.
struct AxisPlan {
    taps: usize,
    indices: Vec<usize>,
    weights: Vec<f64>,
}

fn plan_axis(in_len: usize, out_len: usize, antialias: bool) -> AxisPlan {
    let scale = out_len as f64 / in_len as f64;
    let widen = antialias && scale < 1.0;
    let kernel_width = if widen { 4.0 / scale } else { 4.0 };
    let kernel_scale = if widen { scale } else { 1.0 };
    let taps = kernel_width.ceil() as usize + 2;

    let mut indices = Vec::with_capacity(out_len * taps);
    let mut weights = Vec::with_capacity(out_len * taps);
    for i in 0..out_len {
        // Center of output sample i in input coordinates (0-based).
        let u = (i as f64 + 0.5) / scale - 0.5;
        let left = (u - kernel_width / 2.0).floor() as i64;
        let mut raw = Vec::with_capacity(taps);
        let mut sum = 0.0;
        for j in 0..taps {
            let idx = left + j as i64;
            let w = kernel_scale * cubic_kernel(kernel_scale * (u - idx as f64));
            raw.push(w);
            sum += w;
        }
        for (j, w) in raw.iter().enumerate() {
            let idx = (left + j as i64).clamp(0, in_len as i64 - 1) as usize;
            indices.push(idx);
            weights.push(w / sum);
        }
    }
    AxisPlan {
        taps,
        indices,
        weights,
    }
}

/// Resamples one plane horizontally: (in_w x h) -> (out_w x h).
fn resample_rows(src: &[f64], in_w: usize, h: usize, plan: &AxisPlan, out_w: usize) -> Vec<f64> {
    let mut out = vec![0.0; out_w * h];
    for y in 0..h {
        let row = &src[y * in_w..(y + 1) * in_w];
        for x in 0..out_w {
            let base = x * plan.taps;
            let mut acc = 0.0;
            for t in 0..plan.taps {
                acc += plan.weights[base + t] * row[plan.indices[base + t]];
            }
            out[y * out_w + x] = acc;
        }
    }
    out
}

/// Resamples one plane vertically: (w x in_h) -> (w x out_h).
fn resample_cols(src: &[f64], w: usize, plan: &AxisPlan, out_h: usize) -> Vec<f64> {
    let mut out = vec![0.0; w * out_h];
    for y in 0..out_h {
        let base = y * plan.taps;
        for x in 0..w {
            let mut acc = 0.0;
            for t in 0..plan.taps {
                acc += plan.weights[base + t] * src[plan.indices[base + t] * w + x];
            }
            out[y * w + x] = acc;
        }
    }
    out
}

/// Separable bicubic resampling compatible with the MATLAB `imresize`
/// convention: a = -0.5 kernel, edge replication via index clamping, and,
/// when downscaling with `antialias`, kernel support widened by the scale
/// ratio. Output is clamped to [0, 1].
pub fn bicubic_resize(
    img: &ImageBuffer,
    out_w: usize,
    out_h: usize,
    antialias: bool,
) -> Result<ImageBuffer> {
    if out_w == 0 || out_h == 0 {
        return Err(ImageError::ZeroTargetDimension);
    }
    let (in_w, in_h) = (img.width(), img.height());
    let x_plan = plan_axis(in_w, out_w, antialias);
    let y_plan = plan_axis(in_h, out_h, antialias);

    let mut data = Vec::with_capacity(out_w * out_h * img.channels());
    for c in 0..img.channels() {
        let horiz = resample_rows(img.plane(c), in_w, in_h, &x_plan, out_w);
        let full = resample_cols(&horiz, out_w, &y_plan, out_h);
        data.extend(full.into_iter().map(|v| v.clamp(0.0, 1.0)));
    }
    ImageBuffer::from_data(out_w, out_h, img.channels(), data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_values() {
        assert_eq!(cubic_kernel(0.0), 1.0);
        assert_eq!(cubic_kernel(1.0), 0.0);
        assert_eq!(cubic_kernel(2.0), 0.0);
        assert_eq!(cubic_kernel(-2.5), 0.0);
        assert!((cubic_kernel(0.5) - 0.5625).abs() < 1e-15);
        assert!((cubic_kernel(1.5) + 0.0625).abs() < 1e-15);
    }

    #[test]
    fn identity_resize_is_exact() {
        let data: Vec<f64> = (0..48).map(|i| (i as f64 * 0.33).fract()).collect();
        let img = ImageBuffer::from_data(8, 6, 1, data).unwrap();
        let same = bicubic_resize(&img, 8, 6, false).unwrap();
        assert_eq!(same.data(), img.data());
    }

    #[test]
    fn constant_image_stays_constant() {
        let img = ImageBuffer::constant(13, 7, 3, 0.4).unwrap();
        for &(w, h, aa) in &[(5usize, 3usize, true), (5, 3, false), (29, 17, false)] {
            let out = bicubic_resize(&img, w, h, aa).unwrap();
            for &v in out.data() {
                assert!((v - 0.4).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_target_rejected() {
        let img = ImageBuffer::constant(4, 4, 1, 0.5).unwrap();
        assert!(matches!(
            bicubic_resize(&img, 0, 4, true),
            Err(ImageError::ZeroTargetDimension)
        ));
    }
}
