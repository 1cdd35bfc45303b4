use pcl_image::Grid;

use crate::{check_shapes, GradientField, LossError, Result};

/// Scaling convention for the type-II DCT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DctNormalization {
    /// Basis k = 0 scaled by sqrt(1/N), k > 0 by sqrt(2/N) per axis; the
    /// transform is orthogonal and its adjoint equals its inverse.
    Orthonormal,
    /// Plain cosine sums without scaling.
    #[default]
    UnnormalizedTypeII,
}

/// Transform extent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DctMode {
    /// One transform over the whole plane.
    #[default]
    FullImage,
    /// Independent 8x8 tiles; planes are replicate-padded (right/bottom) to
    /// multiples of 8 first.
    Blockwise8x8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DctConfig {
    pub normalization: DctNormalization,
    pub mode: DctMode,
}

/// DCT coefficients of one plane. For blockwise transforms of planes whose
/// dimensions are not multiples of 8 these are the padded dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffGrid {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

/// 1-D type-II DCT basis for a fixed length.
struct Dct1d {
    n: usize,
    // cos[k * n + m] = cos(pi * (2m + 1) * k / (2n))
    cos: Vec<f64>,
}

impl Dct1d {
    fn new(n: usize) -> Self {
        let mut cos = vec![0.0; n * n];
        for k in 0..n {
            for m in 0..n {
                cos[k * n + m] =
                    (std::f64::consts::PI * (2 * m + 1) as f64 * k as f64 / (2 * n) as f64).cos();
            }
        }
        Self { n, cos }
    }

    fn scale(&self, k: usize, norm: DctNormalization) -> f64 {
        match norm {
            DctNormalization::Orthonormal => {
                if k == 0 {
                    (1.0 / self.n as f64).sqrt()
                } else {
                    (2.0 / self.n as f64).sqrt()
                }
            }
            DctNormalization::UnnormalizedTypeII => 1.0,
        }
    }

    fn forward(&self, x: &[f64], out: &mut [f64], norm: DctNormalization) {
        for (k, out_k) in out.iter_mut().enumerate() {
            let row = &self.cos[k * self.n..(k + 1) * self.n];
            let mut acc = 0.0;
            for (xm, cm) in x.iter().zip(row) {
                acc += xm * cm;
            }
            *out_k = self.scale(k, norm) * acc;
        }
    }

    /// Transpose of `forward`: out[m] = sum_k s_k x[k] cos[k][m].
    fn adjoint(&self, x: &[f64], out: &mut [f64], norm: DctNormalization) {
        out.fill(0.0);
        for (k, &xk) in x.iter().enumerate() {
            let s = self.scale(k, norm) * xk;
            let row = &self.cos[k * self.n..(k + 1) * self.n];
            for (o, cm) in out.iter_mut().zip(row) {
                *o += s * cm;
            }
        }
    }

    /// True inverse. Equals `adjoint` for the orthonormal scaling.
    fn inverse(&self, x: &[f64], out: &mut [f64], norm: DctNormalization) {
        match norm {
            DctNormalization::Orthonormal => self.adjoint(x, out, norm),
            DctNormalization::UnnormalizedTypeII => {
                out.fill(0.0);
                let n = self.n as f64;
                for (k, &xk) in x.iter().enumerate() {
                    let q = if k == 0 { 1.0 / n } else { 2.0 / n };
                    let s = q * xk;
                    let row = &self.cos[k * self.n..(k + 1) * self.n];
                    for (o, cm) in out.iter_mut().zip(row) {
                        *o += s * cm;
                    }
                }
            }
        }
    }
}

#[derive(Clone, Copy)]
enum Pass {
    Forward,
    Adjoint,
    Inverse,
}

fn apply_1d(basis: &Dct1d, x: &[f64], out: &mut [f64], norm: DctNormalization, pass: Pass) {
    match pass {
        Pass::Forward => basis.forward(x, out, norm),
        Pass::Adjoint => basis.adjoint(x, out, norm),
        Pass::Inverse => basis.inverse(x, out, norm),
    }
}

/// Separable 2-D pass over a w x h plane: rows first, then columns.
fn separable_2d(data: &[f64], w: usize, h: usize, norm: DctNormalization, pass: Pass) -> Vec<f64> {
    let row_basis = Dct1d::new(w);
    let col_basis = Dct1d::new(h);
    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        apply_1d(
            &row_basis,
            &data[y * w..(y + 1) * w],
            &mut tmp[y * w..(y + 1) * w],
            norm,
            pass,
        );
    }
    let mut col_in = vec![0.0; h];
    let mut col_out = vec![0.0; h];
    let mut out = vec![0.0; w * h];
    for x in 0..w {
        for y in 0..h {
            col_in[y] = tmp[y * w + x];
        }
        apply_1d(&col_basis, &col_in, &mut col_out, norm, pass);
        for y in 0..h {
            out[y * w + x] = col_out[y];
        }
    }
    out
}

fn pad_replicate(data: &[f64], w: usize, h: usize) -> (Vec<f64>, usize, usize) {
    let pw = w.div_ceil(8) * 8;
    let ph = h.div_ceil(8) * 8;
    if pw == w && ph == h {
        return (data.to_vec(), w, h);
    }
    let mut padded = vec![0.0; pw * ph];
    for y in 0..ph {
        let sy = y.min(h - 1);
        for x in 0..pw {
            let sx = x.min(w - 1);
            padded[y * pw + x] = data[sy * w + sx];
        }
    }
    (padded, pw, ph)
}

/// Adjoint of `pad_replicate`: folds padded-cell contributions back onto the
/// edge pixels they replicated.
fn pad_adjoint(g: &[f64], pw: usize, ph: usize, w: usize, h: usize) -> Vec<f64> {
    let mut out = vec![0.0; w * h];
    for y in 0..ph {
        let sy = y.min(h - 1);
        for x in 0..pw {
            let sx = x.min(w - 1);
            out[sy * w + sx] += g[y * pw + x];
        }
    }
    out
}

fn blockwise_2d(data: &[f64], w: usize, h: usize, norm: DctNormalization, pass: Pass) -> Vec<f64> {
    debug_assert!(w.is_multiple_of(8) && h.is_multiple_of(8));
    let basis = Dct1d::new(8);
    let mut out = vec![0.0; w * h];
    let mut tile = [0.0f64; 64];
    let mut tmp = [0.0f64; 64];
    for by in (0..h).step_by(8) {
        for bx in (0..w).step_by(8) {
            for ty in 0..8 {
                for tx in 0..8 {
                    tile[ty * 8 + tx] = data[(by + ty) * w + bx + tx];
                }
            }
            for ty in 0..8 {
                apply_1d(
                    &basis,
                    &tile[ty * 8..ty * 8 + 8],
                    &mut tmp[ty * 8..ty * 8 + 8],
                    norm,
                    pass,
                );
            }
            let mut col_in = [0.0f64; 8];
            let mut col_out = [0.0f64; 8];
            for tx in 0..8 {
                for ty in 0..8 {
                    col_in[ty] = tmp[ty * 8 + tx];
                }
                apply_1d(&basis, &col_in, &mut col_out, norm, pass);
                for ty in 0..8 {
                    out[(by + ty) * w + bx + tx] = col_out[ty];
                }
            }
        }
    }
    out
}

fn plane_pass(
    data: &[f64],
    w: usize,
    h: usize,
    cfg: &DctConfig,
    pass: Pass,
) -> (Vec<f64>, usize, usize) {
    match cfg.mode {
        DctMode::FullImage => (separable_2d(data, w, h, cfg.normalization, pass), w, h),
        DctMode::Blockwise8x8 => {
            let (padded, pw, ph) = pad_replicate(data, w, h);
            (
                blockwise_2d(&padded, pw, ph, cfg.normalization, pass),
                pw,
                ph,
            )
        }
    }
}

/// 2-D type-II DCT of a single-channel plane.
pub fn dct2(plane: &impl Grid, cfg: &DctConfig) -> Result<CoeffGrid> {
    if plane.channels() != 1 {
        return Err(LossError::NotSingleChannel(plane.channels()));
    }
    if plane.samples().is_empty() {
        return Err(LossError::EmptyInput);
    }
    let (data, w, h) = plane_pass(
        plane.samples(),
        plane.width(),
        plane.height(),
        cfg,
        Pass::Forward,
    );
    Ok(CoeffGrid {
        width: w,
        height: h,
        data,
    })
}

/// Inverse of [`dct2`] on a coefficient grid. For blockwise grids the result
/// has the (padded) grid dimensions.
pub fn idct2(coeffs: &CoeffGrid, cfg: &DctConfig) -> Vec<f64> {
    match cfg.mode {
        DctMode::FullImage => separable_2d(
            &coeffs.data,
            coeffs.width,
            coeffs.height,
            cfg.normalization,
            Pass::Inverse,
        ),
        DctMode::Blockwise8x8 => blockwise_2d(
            &coeffs.data,
            coeffs.width,
            coeffs.height,
            cfg.normalization,
            Pass::Inverse,
        ),
    }
}

/// Mean squared difference of DCT coefficients, averaged over channels and
/// normalized by the source pixel count W*H.
pub fn dct_loss(hr: &impl Grid, sr: &impl Grid, cfg: &DctConfig) -> Result<f64> {
    let (w, h, c) = check_shapes(hr, sr)?;
    let n = w * h;
    let mut sum = 0.0;
    for ch in 0..c {
        let a = &hr.samples()[ch * n..(ch + 1) * n];
        let b = &sr.samples()[ch * n..(ch + 1) * n];
        let (ca, ..) = plane_pass(a, w, h, cfg, Pass::Forward);
        let (cb, ..) = plane_pass(b, w, h, cfg, Pass::Forward);
        sum += ca
            .iter()
            .zip(&cb)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>();
    }
    Ok(sum / (n * c) as f64)
}

/// Gradient of [`dct_loss`] with respect to the SR image:
/// -(2 / (W*H*C)) * DCT^T (DCT(hr) - DCT(sr)), where DCT^T is the adjoint of
/// the configured transform (its inverse in the orthonormal case).
pub fn dct_loss_grad(hr: &impl Grid, sr: &impl Grid, cfg: &DctConfig) -> Result<GradientField> {
    let (w, h, c) = check_shapes(hr, sr)?;
    let n = w * h;
    let norm = -2.0 / (n * c) as f64;
    let mut data = vec![0.0; n * c];
    for ch in 0..c {
        let a = &hr.samples()[ch * n..(ch + 1) * n];
        let b = &sr.samples()[ch * n..(ch + 1) * n];
        let (ca, pw, ph) = plane_pass(a, w, h, cfg, Pass::Forward);
        let (cb, ..) = plane_pass(b, w, h, cfg, Pass::Forward);
        let diff: Vec<f64> = ca.iter().zip(&cb).map(|(x, y)| x - y).collect();
        let back = match cfg.mode {
            DctMode::FullImage => separable_2d(&diff, pw, ph, cfg.normalization, Pass::Adjoint),
            DctMode::Blockwise8x8 => {
                let g = blockwise_2d(&diff, pw, ph, cfg.normalization, Pass::Adjoint);
                pad_adjoint(&g, pw, ph, w, h)
            }
        };
        for (o, v) in data[ch * n..(ch + 1) * n].iter_mut().zip(&back) {
            *o = norm * v;
        }
    }
    Ok(GradientField::new(w, h, c, data))
}
