//! Image-domain optimizer: projected gradient descent with backtracking line
//! search on the weighted content objective, plus weight sweeps that record
//! the distortion (RMSE) and naturalness (NIQE) of each optimum.

use pcl_image::{rgb_to_luma, Grid, ImageBuffer, LumaPlane, PlaneRef};
use pcl_losses::{combined_loss, DctConfig, GradientField, LossReport, LossWeights, SmoothingEps};
use pcl_metrics::{niqe, NiqeModel};
use rayon::prelude::*;

#[derive(Debug, thiserror::Error)]
pub enum ExplorerError {
    #[error("invalid descent configuration: {0}")]
    InvalidConfig(String),
    #[error("non-finite gradient at step {step}; aborting descent")]
    NonFiniteGradient { step: usize },
    #[error(transparent)]
    Loss(#[from] pcl_losses::LossError),
    #[error(transparent)]
    Metric(#[from] pcl_metrics::MetricError),
    #[error(transparent)]
    Image(#[from] pcl_image::ImageError),
}

pub type Result<T> = std::result::Result<T, ExplorerError>;

/// Sufficient-decrease constant for the Armijo test.
const ARMIJO_C: f64 = 1e-4;
/// Line search gives up when the trial step shrinks below this.
const MIN_STEP: f64 = 1e-18;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentConfig {
    pub max_steps: usize,
    pub initial_step: f64,
    pub backtrack: f64,
    pub stop_tol: f64,
    pub eps: SmoothingEps,
}

impl Default for DescentConfig {
    fn default() -> Self {
        Self {
            max_steps: 500,
            initial_step: 0.1,
            backtrack: 0.5,
            stop_tol: 1e-9,
            eps: SmoothingEps::new(1e-3).expect("valid default"),
        }
    }
}

impl DescentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_steps == 0 {
            return Err(ExplorerError::InvalidConfig(
                "max_steps must be positive".into(),
            ));
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return Err(ExplorerError::InvalidConfig(
                "initial_step must be positive".into(),
            ));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(ExplorerError::InvalidConfig(
                "backtracking factor must lie in (0, 1)".into(),
            ));
        }
        if !(self.stop_tol > 0.0 && self.stop_tol.is_finite()) {
            return Err(ExplorerError::InvalidConfig(
                "stop_tol must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentResult {
    pub image: ImageBuffer,
    /// Objective at the start followed by the value after every accepted step.
    pub trace: Vec<f64>,
    /// Number of accepted steps.
    pub steps: usize,
    /// Losses at the final iterate, smoothed at the descent eps.
    pub report: LossReport,
}

fn objective(
    hr: &ImageBuffer,
    x: &[f64],
    weights: &LossWeights,
    dct_cfg: &DctConfig,
    eps: SmoothingEps,
) -> Result<(LossReport, GradientField)> {
    let view = PlaneRef::new(hr.width(), hr.height(), hr.channels(), x)?;
    Ok(combined_loss(hr, &view, weights, dct_cfg, eps, None)?)
}

/// Descends the weighted objective from `start`, clamping every iterate to
/// [0, 1]. Accepted steps never increase the objective; the line search
/// doubles the trial step after success and backtracks on failure.
///
/// A positive adversarial weight is accepted but inert (its pixel gradient
/// would require the discriminator network); a warning is logged.
pub fn descend(
    hr: &ImageBuffer,
    start: &ImageBuffer,
    weights: &LossWeights,
    cfg: &DescentConfig,
    dct_cfg: &DctConfig,
) -> Result<DescentResult> {
    cfg.validate()?;
    let mut weights = *weights;
    if weights.w_adv > 0.0 {
        log::warn!(
            "adversarial weight {} is inert during image-domain descent",
            weights.w_adv
        );
        weights.w_adv = 0.0;
    }
    if weights.w_c == 0.0 && weights.w_d == 0.0 && weights.w_dct == 0.0 {
        return Err(ExplorerError::InvalidConfig(
            "descent needs a positive content, differential or DCT weight".into(),
        ));
    }

    let mut x: Vec<f64> = start.samples().to_vec();
    let (mut report, mut grad) = objective(hr, &x, &weights, dct_cfg, cfg.eps)?;
    if !grad.is_finite() {
        return Err(ExplorerError::NonFiniteGradient { step: 0 });
    }
    let mut trace = vec![report.total];
    let mut steps = 0;
    let mut step_size = cfg.initial_step;

    while steps < cfg.max_steps {
        let gsq = grad.squared_norm();
        if gsq == 0.0 {
            break;
        }
        let mut t = step_size;
        let mut accepted = None;
        while t >= MIN_STEP {
            let candidate: Vec<f64> = x
                .iter()
                .zip(grad.data())
                .map(|(xi, gi)| (xi - t * gi).clamp(0.0, 1.0))
                .collect();
            if candidate == x {
                break; // fully clamped; no direction left
            }
            let (cand_report, cand_grad) = objective(hr, &candidate, &weights, dct_cfg, cfg.eps)?;
            if cand_report.total <= report.total - ARMIJO_C * t * gsq {
                accepted = Some((candidate, cand_report, cand_grad, t));
                break;
            }
            t *= cfg.backtrack;
        }
        let Some((candidate, cand_report, cand_grad, used)) = accepted else {
            break; // line search stalled: converged as far as f64 allows
        };
        if !cand_grad.is_finite() {
            return Err(ExplorerError::NonFiniteGradient { step: steps + 1 });
        }
        let decrease = report.total - cand_report.total;
        x = candidate;
        report = cand_report;
        grad = cand_grad;
        trace.push(report.total);
        steps += 1;
        step_size = used * 2.0;
        if decrease < cfg.stop_tol {
            break;
        }
    }

    let image = ImageBuffer::from_data(hr.width(), hr.height(), hr.channels(), x)?;
    Ok(DescentResult {
        image,
        trace,
        steps,
        report,
    })
}

/// One sweep point: the optimum reached under one weight setting.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub weights: LossWeights,
    pub rmse: f64,
    pub niqe: f64,
    pub report: LossReport,
    pub steps: usize,
    pub trace: Vec<f64>,
}

/// Outcome per requested weight setting; failures are flagged, not fatal.
#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub weights: LossWeights,
    pub outcome: std::result::Result<SweepPoint, String>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub entries: Vec<SweepEntry>,
}

fn to_luma(img: &ImageBuffer) -> Result<LumaPlane> {
    if img.channels() == 3 {
        Ok(rgb_to_luma(img)?)
    } else {
        Ok(LumaPlane::from_image(img)?)
    }
}

/// Runs [`descend`] once per weight setting from the same start image and
/// records the final RMSE (against `hr`, full frame) and NIQE per point.
/// Points run independently (possibly in parallel); entries come back in
/// request order.
pub fn sweep(
    hr: &ImageBuffer,
    start: &ImageBuffer,
    weight_list: &[LossWeights],
    cfg: &DescentConfig,
    dct_cfg: &DctConfig,
    model: &NiqeModel,
) -> Result<SweepResult> {
    if weight_list.is_empty() {
        return Err(ExplorerError::InvalidConfig("empty weight list".into()));
    }
    let hr_luma = to_luma(hr)?;
    let entries: Vec<SweepEntry> = weight_list
        .par_iter()
        .map(|weights| {
            let outcome = (|| -> Result<SweepPoint> {
                let result = descend(hr, start, weights, cfg, dct_cfg)?;
                let final_luma = to_luma(&result.image)?;
                let rmse = pcl_metrics::rmse(&hr_luma, &final_luma)?;
                let niqe_score = niqe(&final_luma, model)?;
                Ok(SweepPoint {
                    weights: *weights,
                    rmse,
                    niqe: niqe_score,
                    report: result.report,
                    steps: result.steps,
                    trace: result.trace,
                })
            })();
            SweepEntry {
                weights: *weights,
                outcome: outcome.map_err(|e| e.to_string()),
            }
        })
        .collect();
    Ok(SweepResult { entries })
}
