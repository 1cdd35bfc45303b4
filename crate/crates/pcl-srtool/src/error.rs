use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("cannot read directory {path}: {source}")]
    DirRead {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("no matching HR/SR stems between {0} and {1}")]
    EmptyIntersection(PathBuf, PathBuf),
    #[error("scale must be at least 2, got {0}")]
    BadScale(usize),
    #[error("HR image {stem} is {width}x{height}, smaller than one {scale}x{scale} block")]
    HrTooSmall {
        stem: String,
        width: usize,
        height: usize,
        scale: usize,
    },
    #[error("dimension mismatch for {stem}: HR {hr_w}x{hr_h} vs SR {sr_w}x{sr_h} (not a x{scale} modcrop)")]
    PairDimMismatch {
        stem: String,
        hr_w: usize,
        hr_h: usize,
        sr_w: usize,
        sr_h: usize,
        scale: usize,
    },
    #[error("every pair failed to evaluate ({count} failures); first: {first}")]
    NoSuccessfulPairs {
        count: usize,
        first: Box<HarnessError>,
    },
    #[error(transparent)]
    Image(#[from] pcl_image::ImageError),
    #[error(transparent)]
    Metric(#[from] pcl_metrics::MetricError),
}
