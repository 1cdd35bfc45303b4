//! Dataset-level evaluation: directory scanning and HR/SR pairing, bicubic
//! baseline generation, metric aggregation, and deterministic JSON/CSV report
//! emission.

mod dataset;
mod error;
mod report;

pub use dataset::{
    make_bicubic_baseline, scan_dataset, BaselineOutcome, DatasetManifest, PairPaths,
};
pub use error::HarnessError;
pub use report::{
    evaluate_dataset, render_csv, render_json, AggregateReport, MeanMetrics, PairRecord,
};

pub type Result<T> = std::result::Result<T, HarnessError>;

/// Rounds to 4 decimal places, the precision used in emitted reports.
pub fn round4(v: f64) -> f64 {
    if v.is_finite() {
        (v * 10000.0).round() / 10000.0
    } else {
        v
    }
}
