#[derive(Debug, thiserror::Error)]
pub enum LossError {
    #[error("shape mismatch: expected {expected:?}, got {got:?} (width, height, channels)")]
    ShapeMismatch {
        expected: (usize, usize, usize),
        got: (usize, usize, usize),
    },
    #[error("image must have at least 2 pixels along one dimension for differential losses")]
    ImageTooThin,
    #[error("empty input plane")]
    EmptyInput,
    #[error("dct2 expects a single-channel plane, got {0} channels")]
    NotSingleChannel(usize),
    #[error("invalid loss weights: {0}")]
    InvalidWeights(String),
    #[error("smoothing eps must be finite and non-negative, got {0}")]
    InvalidEps(f64),
    #[error("adversarial weight is positive but no discriminator output was supplied")]
    MissingDiscriminator,
    #[error("discriminator probability {0} outside (0, 1]")]
    InvalidProbability(f64),
    #[error("diverged adversarial loss: discriminator probability is 0")]
    DivergedLoss,
}
