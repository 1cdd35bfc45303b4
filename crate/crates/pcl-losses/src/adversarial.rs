use crate::{LossError, Result};

/// Discriminator output for the adversarial term, either as a probability in
/// (0, 1] or as a raw logit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiscriminatorOutput {
    Probability(f64),
    Logit(f64),
}

/// Adversarial loss -ln D for the reconstructed image.
///
/// The probability form computes -ln(d) directly; the logit form computes
/// softplus(-z) stably, which equals -ln(sigmoid(z)).
pub fn adversarial_loss(d: DiscriminatorOutput) -> Result<f64> {
    match d {
        DiscriminatorOutput::Probability(p) => {
            if p == 0.0 {
                return Err(LossError::DivergedLoss);
            }
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(LossError::InvalidProbability(p));
            }
            Ok(-p.ln())
        }
        DiscriminatorOutput::Logit(z) => {
            if !z.is_finite() {
                return Err(LossError::InvalidProbability(z));
            }
            // softplus(-z): for z <= 0 use -z + ln(1 + e^z)
            Ok(if z <= 0.0 {
                -z + z.exp().ln_1p()
            } else {
                (-z).exp().ln_1p()
            })
        }
    }
}

/// d(adversarial_loss)/d(logit) = sigmoid(logit) - 1, computed stably.
pub fn adversarial_logit_grad(logit: f64) -> f64 {
    if logit >= 0.0 {
        let e = (-logit).exp();
        -e / (1.0 + e)
    } else {
        let e = logit.exp();
        -1.0 / (1.0 + e)
    }
}
