//! The four reconstruction losses (content/L1, differential content,
//! DCT-coefficient, adversarial), each with an analytic gradient with
//! respect to the reconstructed image (or discriminator logit), plus a
//! weighted combination.
//!
//! Loss values are reported exactly (plain L1/L2). For optimization the L1
//! terms can be Charbonnier-smoothed: |r| is replaced by sqrt(r^2 + eps^2) -
//! eps, which vanishes at r = 0 and has gradient r / sqrt(r^2 + eps^2).

mod adversarial;
mod combined;
mod content;
mod dct;
mod error;
mod types;

pub use adversarial::{adversarial_logit_grad, adversarial_loss, DiscriminatorOutput};
pub use combined::combined_loss;
pub use content::{
    content_loss, content_loss_grad, content_loss_smoothed, differential_content_loss,
    differential_content_loss_grad, differential_content_loss_smoothed,
};
pub use dct::{
    dct2, dct_loss, dct_loss_grad, idct2, CoeffGrid, DctConfig, DctMode, DctNormalization,
};
pub use error::LossError;
pub use types::{GradientField, LossReport, LossWeights, SmoothingEps};

pub type Result<T> = std::result::Result<T, LossError>;

pub(crate) fn check_shapes(
    a: &impl pcl_image::Grid,
    b: &impl pcl_image::Grid,
) -> Result<(usize, usize, usize)> {
    if !a.same_shape(b) {
        return Err(LossError::ShapeMismatch {
            expected: (a.width(), a.height(), a.channels()),
            got: (b.width(), b.height(), b.channels()),
        });
    }
    Ok((a.width(), a.height(), a.channels()))
}
