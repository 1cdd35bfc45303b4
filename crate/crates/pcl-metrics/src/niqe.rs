//! No-reference quality scoring from natural-scene statistics.
//!
//! Pipeline: (1) local mean-subtracted contrast normalization (MSCN) of the
//! 0-255 luma with a 7x7 Gaussian window (sigma 7/6) and replicate borders;
//! (2) per-patch features: a generalized-Gaussian fit (shape, variance) of
//! the MSCN coefficients plus asymmetric-GGD fits (shape, mean, left/right
//! variance) of the four circularly shifted neighbor products (horizontal,
//! vertical, both diagonals), computed at the original scale and at a
//! bicubic x0.5 scale, 18 + 18 = 36 features; (3) patches kept when their
//! mean local deviation exceeds 0.75 of the sharpest patch at the first
//! scale; (4) the score is the Mahalanobis-style distance between the
//! image's feature Gaussian and a pristine-corpus model.

use once_cell::sync::Lazy;
use pcl_image::{bicubic_resize, rgb_to_luma, ImageBuffer, LumaPlane};
use statrs::function::gamma::gamma;

use crate::{MetricError, Result};

pub const NIQE_FEATURE_DIM: usize = 36;

const SHARPNESS_FRACTION: f64 = 0.75;
const COVARIANCE_RIDGE: f64 = 1e-10;
const MSCN_WINDOW: usize = 7;
const MSCN_SIGMA: f64 = 7.0 / 6.0;

/// Pristine-corpus natural-scene-statistics model: feature mean and
/// covariance, with the source-resolution patch size baked in.
#[derive(Debug, Clone, PartialEq)]
pub struct NiqeModel {
    patch_size: usize,
    mu: Vec<f64>,
    sigma: Vec<f64>,
    version: String,
}

impl NiqeModel {
    pub fn new(patch_size: usize, mu: Vec<f64>, sigma: Vec<f64>, version: String) -> Result<Self> {
        check_patch_size(patch_size)?;
        if mu.len() != NIQE_FEATURE_DIM {
            return Err(MetricError::BadModelShape(format!(
                "mean has {} entries, expected {NIQE_FEATURE_DIM}",
                mu.len()
            )));
        }
        if sigma.len() != NIQE_FEATURE_DIM * NIQE_FEATURE_DIM {
            return Err(MetricError::BadModelShape(format!(
                "covariance has {} entries, expected {}",
                sigma.len(),
                NIQE_FEATURE_DIM * NIQE_FEATURE_DIM
            )));
        }
        let mut asym = 0.0f64;
        for j in 0..NIQE_FEATURE_DIM {
            for k in 0..j {
                asym = asym
                    .max((sigma[j * NIQE_FEATURE_DIM + k] - sigma[k * NIQE_FEATURE_DIM + j]).abs());
            }
        }
        if asym > 1e-9 {
            return Err(MetricError::AsymmetricCovariance(asym));
        }
        Ok(Self {
            patch_size,
            mu,
            sigma,
            version,
        })
    }

    pub fn patch_size(&self) -> usize {
        self.patch_size
    }

    pub fn feature_dim(&self) -> usize {
        NIQE_FEATURE_DIM
    }

    pub fn mean(&self) -> &[f64] {
        &self.mu
    }

    /// Row-major 36x36 covariance.
    pub fn covariance(&self) -> &[f64] {
        &self.sigma
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    /// True when the covariance is identically zero (e.g. a corpus of
    /// identical images).
    pub fn is_degenerate(&self) -> bool {
        self.sigma.iter().all(|&v| v == 0.0)
    }
}

fn check_patch_size(ps: usize) -> Result<()> {
    if ps < 8 || !ps.is_multiple_of(2) {
        return Err(MetricError::BadPatchSize(ps));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// MSCN
// ---------------------------------------------------------------------------

fn gaussian_window7() -> [f64; MSCN_WINDOW] {
    let mut w = [0.0; MSCN_WINDOW];
    let c = (MSCN_WINDOW / 2) as f64;
    let mut sum = 0.0;
    for (i, wi) in w.iter_mut().enumerate() {
        let d = i as f64 - c;
        *wi = (-d * d / (2.0 * MSCN_SIGMA * MSCN_SIGMA)).exp();
        sum += *wi;
    }
    for wi in &mut w {
        *wi /= sum;
    }
    w
}

/// Same-size separable convolution with replicate borders.
fn filter_same(src: &[f64], w: usize, h: usize, win: &[f64; MSCN_WINDOW]) -> Vec<f64> {
    let r = MSCN_WINDOW / 2;
    let mut horiz = vec![0.0; w * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..w {
            let mut acc = 0.0;
            for (k, wk) in win.iter().enumerate() {
                let sx = (x + k).saturating_sub(r).min(w - 1);
                acc += wk * row[sx];
            }
            horiz[y * w + x] = acc;
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, wk) in win.iter().enumerate() {
                let sy = (y + k).saturating_sub(r).min(h - 1);
                acc += wk * horiz[sy * w + x];
            }
            out[y * w + x] = acc;
        }
    }
    out
}

/// MSCN coefficients and the local deviation (sigma) field of a 0-255 plane.
fn local_stats(v255: &[f64], w: usize, h: usize) -> (Vec<f64>, Vec<f64>) {
    let win = gaussian_window7();
    let mu = filter_same(v255, w, h, &win);
    let sq: Vec<f64> = v255.iter().map(|v| v * v).collect();
    let e_sq = filter_same(&sq, w, h, &win);
    let mut sigma = vec![0.0; w * h];
    let mut mscn = vec![0.0; w * h];
    for i in 0..v255.len() {
        sigma[i] = (e_sq[i] - mu[i] * mu[i]).abs().sqrt();
        mscn[i] = (v255[i] - mu[i]) / (sigma[i] + 1.0);
    }
    (mscn, sigma)
}

// ---------------------------------------------------------------------------
// GGD / AGGD moment-matching fits
// ---------------------------------------------------------------------------

const GRID_START: f64 = 0.2;
const GRID_STEP: f64 = 0.001;
const GRID_LEN: usize = 9801; // 0.2 ..= 10.0

struct GammaGrid {
    gam: Vec<f64>,
    r_ggd: Vec<f64>,
    r_aggd: Vec<f64>,
}

static GRID: Lazy<GammaGrid> = Lazy::new(|| {
    let mut gam = Vec::with_capacity(GRID_LEN);
    let mut r_ggd = Vec::with_capacity(GRID_LEN);
    let mut r_aggd = Vec::with_capacity(GRID_LEN);
    for i in 0..GRID_LEN {
        let g = GRID_START + GRID_STEP * i as f64;
        let g1 = gamma(1.0 / g);
        let g2 = gamma(2.0 / g);
        let g3 = gamma(3.0 / g);
        gam.push(g);
        r_ggd.push(g1 * g3 / (g2 * g2));
        r_aggd.push(g2 * g2 / (g1 * g3));
    }
    GammaGrid { gam, r_ggd, r_aggd }
});

const DEGENERATE_SHAPE: f64 = 10.0;

/// Shape and variance (second moment) of a zero-mean generalized Gaussian.
fn fit_ggd(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let sigma_sq = x.iter().map(|v| v * v).sum::<f64>() / n;
    let e_abs = x.iter().map(|v| v.abs()).sum::<f64>() / n;
    if sigma_sq == 0.0 || e_abs == 0.0 {
        return (DEGENERATE_SHAPE, 0.0);
    }
    let rho = sigma_sq / (e_abs * e_abs);
    let grid = &*GRID;
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, r) in grid.r_ggd.iter().enumerate() {
        let d = (r - rho).abs();
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    (grid.gam[best], sigma_sq)
}

/// Shape and left/right deviations of an asymmetric generalized Gaussian.
fn fit_aggd(x: &[f64]) -> (f64, f64, f64) {
    let mut sum_sq = 0.0;
    let mut sum_abs = 0.0;
    let (mut n_left, mut sq_left) = (0usize, 0.0);
    let (mut n_right, mut sq_right) = (0usize, 0.0);
    for &v in x {
        sum_sq += v * v;
        sum_abs += v.abs();
        if v < 0.0 {
            n_left += 1;
            sq_left += v * v;
        } else if v > 0.0 {
            n_right += 1;
            sq_right += v * v;
        }
    }
    if sum_sq == 0.0 {
        return (DEGENERATE_SHAPE, 0.0, 0.0);
    }
    let n = x.len() as f64;
    let left = if n_left > 0 {
        (sq_left / n_left as f64).sqrt()
    } else {
        0.0
    };
    let right = if n_right > 0 {
        (sq_right / n_right as f64).sqrt()
    } else {
        0.0
    };
    let rhat = (sum_abs / n) * (sum_abs / n) / (sum_sq / n);
    let rhat_norm = if right == 0.0 {
        // limit of the correction factor as the side ratio grows unbounded
        rhat
    } else {
        let g = left / right;
        rhat * (g * g * g + 1.0) * (g + 1.0) / ((g * g + 1.0) * (g * g + 1.0))
    };
    let grid = &*GRID;
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, r) in grid.r_aggd.iter().enumerate() {
        let d = (r - rhat_norm) * (r - rhat_norm);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    (grid.gam[best], left, right)
}

/// Mean of the fitted AGGD: (r - l) * Gamma(2/a)/Gamma(1/a) * sqrt(Gamma(1/a)/Gamma(3/a)).
fn aggd_mean(alpha: f64, left: f64, right: f64) -> f64 {
    (right - left)
        * (gamma(2.0 / alpha) / gamma(1.0 / alpha))
        * (gamma(1.0 / alpha) / gamma(3.0 / alpha)).sqrt()
}

// ---------------------------------------------------------------------------
// Feature extraction
// ---------------------------------------------------------------------------

const SHIFTS: [(isize, isize); 4] = [(0, 1), (1, 0), (1, 1), (1, -1)];

/// 18 features of one MSCN patch: GGD (shape, variance) of the coefficients
/// plus AGGD (shape, mean, left var, right var) of the 4 neighbor products.
fn patch_features(mscn: &[f64], stride: usize, x0: usize, y0: usize, ps: usize) -> [f64; 18] {
    let mut block = vec![0.0; ps * ps];
    for y in 0..ps {
        for x in 0..ps {
            block[y * ps + x] = mscn[(y0 + y) * stride + x0 + x];
        }
    }
    let mut feats = [0.0; 18];
    let (shape, sigma_sq) = fit_ggd(&block);
    feats[0] = shape;
    feats[1] = sigma_sq;
    let mut pair = vec![0.0; ps * ps];
    for (k, &(dy, dx)) in SHIFTS.iter().enumerate() {
        for y in 0..ps {
            let sy = (y as isize + dy).rem_euclid(ps as isize) as usize;
            for x in 0..ps {
                let sx = (x as isize + dx).rem_euclid(ps as isize) as usize;
                pair[y * ps + x] = block[y * ps + x] * block[sy * ps + sx];
            }
        }
        let (alpha, left, right) = fit_aggd(&pair);
        let base = 2 + 4 * k;
        feats[base] = alpha;
        feats[base + 1] = aggd_mean(alpha, left, right);
        feats[base + 2] = left * left;
        feats[base + 3] = right * right;
    }
    feats
}

fn block_mean(field: &[f64], stride: usize, x0: usize, y0: usize, ps: usize) -> f64 {
    let mut sum = 0.0;
    for y in 0..ps {
        for x in 0..ps {
            sum += field[(y0 + y) * stride + x0 + x];
        }
    }
    sum / (ps * ps) as f64
}

/// Runs the two-scale pipeline on a `[0, 1]` luma plane and returns one
/// 36-feature row per selected patch.
fn extract_selected_features(
    luma: &[f64],
    w: usize,
    h: usize,
    ps: usize,
) -> Result<Vec<[f64; NIQE_FEATURE_DIM]>> {
    let cw = (w / ps) * ps;
    let ch = (h / ps) * ps;
    if cw == 0 || ch == 0 {
        return Err(MetricError::ImageTooSmallForNiqe(w, h, ps));
    }
    let mut cropped = Vec::with_capacity(cw * ch);
    for y in 0..ch {
        cropped.extend_from_slice(&luma[y * w..y * w + cw]);
    }

    let v1: Vec<f64> = cropped.iter().map(|v| v * 255.0).collect();
    let (mscn1, sig1) = local_stats(&v1, cw, ch);

    let img = ImageBuffer::from_data(cw, ch, 1, cropped)?;
    let half = bicubic_resize(&img, cw / 2, ch / 2, true)?;
    let v2: Vec<f64> = half.data().iter().map(|v| v * 255.0).collect();
    let (mscn2, _) = local_stats(&v2, cw / 2, ch / 2);

    let (nx, ny) = (cw / ps, ch / ps);
    let hps = ps / 2;
    let mut rows = Vec::with_capacity(nx * ny);
    let mut sharpness = Vec::with_capacity(nx * ny);
    for ty in 0..ny {
        for tx in 0..nx {
            let f1 = patch_features(&mscn1, cw, tx * ps, ty * ps, ps);
            let f2 = patch_features(&mscn2, cw / 2, tx * hps, ty * hps, hps);
            let mut row = [0.0; NIQE_FEATURE_DIM];
            row[..18].copy_from_slice(&f1);
            row[18..].copy_from_slice(&f2);
            rows.push(row);
            sharpness.push(block_mean(&sig1, cw, tx * ps, ty * ps, ps));
        }
    }
    let peak = sharpness.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    // >= keeps the sharpest patch always selected, including the flat case
    // where every sharpness is zero.
    let selected: Vec<[f64; NIQE_FEATURE_DIM]> = rows
        .into_iter()
        .zip(&sharpness)
        .filter(|(_, &s)| s >= SHARPNESS_FRACTION * peak)
        .map(|(r, _)| r)
        .collect();
    if selected.is_empty() {
        return Err(MetricError::NoSharpPatches);
    }
    Ok(selected)
}

/// Mean and (n-1)-normalized covariance of feature rows. A single row yields
/// a zero covariance.
fn mean_and_cov(rows: &[[f64; NIQE_FEATURE_DIM]]) -> (Vec<f64>, Vec<f64>) {
    let n = rows.len();
    let d = NIQE_FEATURE_DIM;
    let mut mu = vec![0.0; d];
    for row in rows {
        for (m, v) in mu.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut mu {
        *m /= n as f64;
    }
    let mut cov = vec![0.0; d * d];
    if n > 1 {
        for j in 0..d {
            for k in j..d {
                let mut acc = 0.0;
                for row in rows {
                    acc += (row[j] - mu[j]) * (row[k] - mu[k]);
                }
                let c = acc / (n - 1) as f64;
                cov[j * d + k] = c;
                cov[k * d + j] = c;
            }
        }
    }
    (mu, cov)
}

fn to_luma_plane(img: &ImageBuffer) -> Result<LumaPlane> {
    if img.channels() == 3 {
        Ok(rgb_to_luma(img)?)
    } else {
        Ok(LumaPlane::from_image(img)?)
    }
}

/// Scores an image against a pristine model; 0 means the image's aggregate
/// features coincide with the model mean, larger is worse.
pub fn niqe(img: &LumaPlane, model: &NiqeModel) -> Result<f64> {
    let rows = extract_selected_features(img.data(), img.width(), img.height(), model.patch_size)?;
    let (mu_t, sigma_t) = mean_and_cov(&rows);
    score_against_model(model, &mu_t, &sigma_t)
}

pub(crate) fn score_against_model(model: &NiqeModel, mu_t: &[f64], sigma_t: &[f64]) -> Result<f64> {
    let d = NIQE_FEATURE_DIM;
    let mut pooled = nalgebra::DMatrix::<f64>::zeros(d, d);
    for j in 0..d {
        for k in 0..d {
            pooled[(j, k)] = 0.5 * (model.sigma[j * d + k] + sigma_t[j * d + k]);
        }
        pooled[(j, j)] += COVARIANCE_RIDGE;
    }
    let diff =
        nalgebra::DVector::<f64>::from_iterator(d, model.mu.iter().zip(mu_t).map(|(a, b)| a - b));
    let chol = nalgebra::Cholesky::new(pooled).ok_or(MetricError::SingularCovariance)?;
    let solved = chol.solve(&diff);
    Ok(diff.dot(&solved).max(0.0).sqrt())
}

/// Fits a pristine model from a corpus of natural images: pools the sharp
/// patches' features of every image, then takes their mean and sample
/// covariance. The pooling is order-independent.
pub fn fit_niqe_model(corpus: &[ImageBuffer], patch_size: usize) -> Result<NiqeModel> {
    check_patch_size(patch_size)?;
    const MIN_CORPUS: usize = 10;
    if corpus.len() < MIN_CORPUS {
        return Err(MetricError::CorpusTooSmall(corpus.len(), MIN_CORPUS));
    }
    for (index, img) in corpus.iter().enumerate() {
        if img.width() < 2 * patch_size || img.height() < 2 * patch_size {
            return Err(MetricError::CorpusImageTooSmall {
                index,
                width: img.width(),
                height: img.height(),
                min: 2 * patch_size,
            });
        }
    }
    let mut rows: Vec<[f64; NIQE_FEATURE_DIM]> = Vec::new();
    for img in corpus {
        let luma = to_luma_plane(img)?;
        rows.extend(extract_selected_features(
            luma.data(),
            luma.width(),
            luma.height(),
            patch_size,
        )?);
    }
    // Sorting the pooled rows makes the reduction independent of corpus order.
    rows.sort_by(|a, b| {
        for (x, y) in a.iter().zip(b) {
            match x.total_cmp(y) {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        std::cmp::Ordering::Equal
    });
    let (mu, sigma) = mean_and_cov(&rows);
    NiqeModel::new(patch_size, mu, sigma, "v1".to_string())
}
