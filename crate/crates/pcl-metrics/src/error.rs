use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum MetricError {
    #[error("shape mismatch: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("channel mismatch: {0} vs {1}")]
    ChannelMismatch(usize, usize),
    #[error("image {0}x{1} smaller than the 11x11 SSIM window")]
    ImageTooSmallForSsim(usize, usize),
    #[error("image {0}x{1} smaller than one {2}x{2} patch")]
    ImageTooSmallForNiqe(usize, usize, usize),
    #[error("patch size {0} must be even and at least 8")]
    BadPatchSize(usize),
    #[error("no patch reached the sharpness threshold")]
    NoSharpPatches,
    #[error("pooled covariance is singular even after ridge regularization")]
    SingularCovariance,
    #[error("pristine corpus has {0} image(s); at least {1} required")]
    CorpusTooSmall(usize, usize),
    #[error("corpus image {index} is {width}x{height}; each side must be >= {min}")]
    CorpusImageTooSmall {
        index: usize,
        width: usize,
        height: usize,
        min: usize,
    },
    #[error("Ma score {0} outside [0, 10]")]
    MaOutOfRange(f64),
    #[error("NIQE score {0} must be non-negative")]
    NegativeNiqe(f64),
    #[error("border discard {0} does not fit a {1}x{2} image")]
    BorderTooLarge(usize, usize, usize),
    #[error("malformed model file {path}: {reason}")]
    ModelParse { path: PathBuf, reason: String },
    #[error("model file {path}: {source}")]
    ModelIo {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("model covariance is not symmetric (max asymmetry {0})")]
    AsymmetricCovariance(f64),
    #[error("model dimensions invalid: {0}")]
    BadModelShape(String),
    #[error("Ma sidecar {path}: {reason}")]
    MaSidecar { path: PathBuf, reason: String },
    #[error(transparent)]
    Image(#[from] pcl_image::ImageError),
}
