//! Distortion metrics (RMSE, PSNR, SSIM) and perception metrics (NIQE,
//! pluggable Ma score, perceptual index) under the SR benchmark protocol:
//! border discard plus Y-channel evaluation, with RMSE/PSNR reported on the
//! 8-bit intensity scale.

mod distortion;
mod error;
mod evaluate;
mod ma;
mod model_io;
mod niqe;

pub use distortion::{psnr, rmse, ssim};
pub use error::MetricError;
pub use evaluate::{evaluate_pair, perceptual_index, MetricReport};
pub use ma::MaScoreProvider;
pub use niqe::{fit_niqe_model, niqe, NiqeModel, NIQE_FEATURE_DIM};

pub type Result<T> = std::result::Result<T, MetricError>;
