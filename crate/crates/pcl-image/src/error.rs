use std::path::PathBuf;

/// Errors from image construction, I/O and resampling.
#[derive(Debug, thiserror::Error)]
pub enum ImageError {
    #[error("file not found: {0}")]
    Missing(PathBuf),
    #[error("unsupported PNG variant for {path}: {reason}")]
    Unsupported { path: PathBuf, reason: String },
    #[error("failed to decode {path}: {source}")]
    Decode {
        path: PathBuf,
        source: image::ImageError,
    },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid dimensions: {0}")]
    BadDimensions(String),
    #[error("channel count must be 1 or 3, got {0}")]
    BadChannelCount(usize),
    #[error("data length {got} does not match width*height*channels = {expected}")]
    BadDataLength { got: usize, expected: usize },
    #[error("intensity {value} at index {index} outside [0, 1]")]
    OutOfRange { index: usize, value: f64 },
    #[error("expected a 3-channel image, got {0} channel(s)")]
    NotRgb(usize),
    #[error("crop of {n} pixels per side does not fit a {width}x{height} image")]
    CropTooLarge {
        n: usize,
        width: usize,
        height: usize,
    },
    #[error("resize target dimension is zero")]
    ZeroTargetDimension,
}
