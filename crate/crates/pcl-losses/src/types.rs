use crate::{LossError, Result};

/// Per-pixel partial derivatives of a loss with respect to the reconstructed
/// image; same shape as the image it differentiates against.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f64>,
}

impl GradientField {
    pub(crate) fn new(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height * channels);
        Self {
            width,
            height,
            channels,
            data,
        }
    }

    pub fn zeros(width: usize, height: usize, channels: usize) -> Self {
        Self::new(
            width,
            height,
            channels,
            vec![0.0; width * height * channels],
        )
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Accumulates `scale * other` into this field (shapes must agree).
    pub fn add_scaled(&mut self, other: &GradientField, scale: f64) {
        assert_eq!(self.data.len(), other.data.len());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += scale * b;
        }
    }

    pub fn squared_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }
}

/// Non-negative weights for the four losses; at least one must be positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights {
    pub w_c: f64,
    pub w_d: f64,
    pub w_dct: f64,
    pub w_adv: f64,
}

impl LossWeights {
    pub fn new(w_c: f64, w_d: f64, w_dct: f64, w_adv: f64) -> Result<Self> {
        let all = [w_c, w_d, w_dct, w_adv];
        if all.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(LossError::InvalidWeights(format!(
                "weights must be finite and non-negative, got {all:?}"
            )));
        }
        if all.iter().all(|w| *w == 0.0) {
            return Err(LossError::InvalidWeights(
                "at least one weight must be positive".into(),
            ));
        }
        Ok(Self {
            w_c,
            w_d,
            w_dct,
            w_adv,
        })
    }

    pub fn content_only() -> Self {
        Self {
            w_c: 1.0,
            w_d: 0.0,
            w_dct: 0.0,
            w_adv: 0.0,
        }
    }
}

impl Default for LossWeights {
    /// Content terms dominate; the adversarial term is a small report-only
    /// contribution. Purely a configuration default.
    fn default() -> Self {
        Self {
            w_c: 1.0,
            w_d: 1.0,
            w_dct: 1.0,
            w_adv: 0.001,
        }
    }
}

/// Charbonnier smoothing half-width for the L1 terms. Zero means exact L1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingEps(f64);

impl SmoothingEps {
    pub const EXACT: SmoothingEps = SmoothingEps(0.0);

    pub fn new(eps: f64) -> Result<Self> {
        if !eps.is_finite() || eps < 0.0 {
            return Err(LossError::InvalidEps(eps));
        }
        Ok(Self(eps))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for SmoothingEps {
    fn default() -> Self {
        Self(1e-6)
    }
}

/// Values of the four losses plus their weighted total for one (HR, SR) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct LossReport {
    pub l_c: f64,
    pub l_d: f64,
    pub l_dct: f64,
    pub l_adv: Option<f64>,
    pub total: f64,
}
