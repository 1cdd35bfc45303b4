use pcl_image::Grid;

use crate::{
    adversarial_loss, check_shapes, content_loss_grad, content_loss_smoothed, dct_loss,
    dct_loss_grad, differential_content_loss_grad, differential_content_loss_smoothed, DctConfig,
    DiscriminatorOutput, GradientField, LossError, LossReport, LossWeights, Result, SmoothingEps,
};

/// Evaluates the weighted objective and its pixel gradient for one (HR, SR)
/// pair.
///
/// The report holds the individual loss values at the given smoothing (exact
/// at eps = 0) and `total` is their weighted sum, so the returned gradient is
/// the exact derivative of `total` with respect to the SR samples. The
/// adversarial term contributes to the report only; its pixel gradient would
/// require the discriminator network.
pub fn combined_loss(
    hr: &impl Grid,
    sr: &impl Grid,
    weights: &LossWeights,
    dct_cfg: &DctConfig,
    eps: SmoothingEps,
    d: Option<DiscriminatorOutput>,
) -> Result<(LossReport, GradientField)> {
    let (w, h, c) = check_shapes(hr, sr)?;
    if weights.w_adv > 0.0 && d.is_none() {
        return Err(LossError::MissingDiscriminator);
    }

    let l_c = content_loss_smoothed(hr, sr, eps)?;
    let l_d = differential_content_loss_smoothed(hr, sr, eps)?;
    let l_dct = dct_loss(hr, sr, dct_cfg)?;
    let l_adv = d.map(adversarial_loss).transpose()?;

    let mut total = weights.w_c * l_c + weights.w_d * l_d + weights.w_dct * l_dct;
    if let Some(adv) = l_adv {
        total += weights.w_adv * adv;
    }

    let mut grad = GradientField::zeros(w, h, c);
    if weights.w_c > 0.0 {
        grad.add_scaled(&content_loss_grad(hr, sr, eps)?, weights.w_c);
    }
    if weights.w_d > 0.0 {
        grad.add_scaled(&differential_content_loss_grad(hr, sr, eps)?, weights.w_d);
    }
    if weights.w_dct > 0.0 {
        grad.add_scaled(&dct_loss_grad(hr, sr, dct_cfg)?, weights.w_dct);
    }

    Ok((
        LossReport {
            l_c,
            l_d,
            l_dct,
            l_adv,
            total,
        },
        grad,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{content_loss, content_loss_grad};
    use pcl_image::PlaneRef;

    fn plane(w: usize, h: usize, data: &[f64]) -> PlaneRef<'_> {
        PlaneRef::new(w, h, 1, data).unwrap()
    }

    #[test]
    fn content_only_weights_reduce_to_content_loss() {
        let a: Vec<f64> = (0..16).map(|i| ((i * 7 + 1) % 11) as f64 / 10.0).collect();
        let b: Vec<f64> = (0..16).map(|i| ((i * 5 + 3) % 13) as f64 / 12.0).collect();
        let w = LossWeights::content_only();
        let (report, grad) = combined_loss(
            &plane(4, 4, &a),
            &plane(4, 4, &b),
            &w,
            &DctConfig::default(),
            SmoothingEps::EXACT,
            None,
        )
        .unwrap();
        assert_eq!(
            report.total,
            content_loss(&plane(4, 4, &a), &plane(4, 4, &b)).unwrap()
        );
        assert_eq!(
            grad,
            content_loss_grad(&plane(4, 4, &a), &plane(4, 4, &b), SmoothingEps::EXACT).unwrap()
        );
    }

    #[test]
    fn identical_pair_is_zero_total_and_zero_gradient() {
        let d: Vec<f64> = (0..24).map(|i| i as f64 / 23.0).collect();
        let w = LossWeights::new(0.7, 1.3, 2.0, 0.0).unwrap();
        let (report, grad) = combined_loss(
            &plane(6, 4, &d),
            &plane(6, 4, &d),
            &w,
            &DctConfig::default(),
            SmoothingEps::new(1e-3).unwrap(),
            None,
        )
        .unwrap();
        assert_eq!(report.total, 0.0);
        assert!(grad.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn total_recomputes_from_individual_losses() {
        let a: Vec<f64> = (0..64).map(|i| ((i * 29 + 7) % 31) as f64 / 30.0).collect();
        let b: Vec<f64> = (0..64).map(|i| ((i * 37 + 5) % 41) as f64 / 40.0).collect();
        let eps = SmoothingEps::new(1e-3).unwrap();
        let cfg = DctConfig::default();
        let weights = LossWeights::new(1.0, 1.0, 1.0, 0.0).unwrap();
        let (report, _) = combined_loss(
            &plane(8, 8, &a),
            &plane(8, 8, &b),
            &weights,
            &cfg,
            eps,
            None,
        )
        .unwrap();
        let want = crate::content_loss_smoothed(&plane(8, 8, &a), &plane(8, 8, &b), eps).unwrap()
            + crate::differential_content_loss_smoothed(&plane(8, 8, &a), &plane(8, 8, &b), eps)
                .unwrap()
            + crate::dct_loss(&plane(8, 8, &a), &plane(8, 8, &b), &cfg).unwrap();
        assert!((report.total - want).abs() < 1e-12);
    }

    #[test]
    fn missing_discriminator_with_positive_weight_is_rejected() {
        let d = [0.1, 0.4, 0.7, 0.9];
        let w = LossWeights::default(); // w_adv = 0.001 > 0
        assert!(matches!(
            combined_loss(
                &plane(2, 2, &d),
                &plane(2, 2, &d),
                &w,
                &DctConfig::default(),
                SmoothingEps::EXACT,
                None,
            ),
            Err(LossError::MissingDiscriminator)
        ));
    }

    #[test]
    fn adversarial_value_enters_total() {
        let d = [0.1, 0.4, 0.7, 0.9];
        let w = LossWeights::new(1.0, 0.0, 0.0, 0.5).unwrap();
        let (report, grad) = combined_loss(
            &plane(2, 2, &d),
            &plane(2, 2, &d),
            &w,
            &DctConfig::default(),
            SmoothingEps::EXACT,
            Some(DiscriminatorOutput::Probability(0.5)),
        )
        .unwrap();
        let ln2 = std::f64::consts::LN_2;
        assert!((report.l_adv.unwrap() - ln2).abs() < 1e-15);
        assert!((report.total - 0.5 * ln2).abs() < 1e-15);
        // pixel gradient excludes the adversarial term
        assert!(grad.data().iter().all(|&v| v == 0.0));
    }
}
