use pcl_image::{bicubic_resize, rgb_to_luma, ChannelMode, EvalProtocol, ImageBuffer, LumaPlane};
use pcl_metrics::{evaluate_pair, fit_niqe_model, niqe, MaScoreProvider, MetricError, NiqeModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const PATCH: usize = 32;

/// Smooth low-frequency field plus mild texture: a stand-in for pristine
/// natural content with non-degenerate scene statistics.
fn synth_image(rng: &mut ChaCha8Rng, w: usize, h: usize) -> ImageBuffer {
    let grid: Vec<f64> = (0..64).map(|_| rng.gen()).collect();
    let base = ImageBuffer::from_data(8, 8, 1, grid).unwrap();
    let up = bicubic_resize(&base, w, h, false).unwrap();
    let data: Vec<f64> = up
        .data()
        .iter()
        .map(|v| (v * 0.7 + 0.15 + rng.gen::<f64>() * 0.1 - 0.05).clamp(0.0, 1.0))
        .collect();
    ImageBuffer::from_data(w, h, 1, data).unwrap()
}

fn pristine_corpus(seed: u64, count: usize) -> Vec<ImageBuffer> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| synth_image(&mut rng, 96, 96)).collect()
}

fn fitted_model() -> NiqeModel {
    fit_niqe_model(&pristine_corpus(40, 12), PATCH).unwrap()
}

#[test]
fn corpus_preconditions_are_enforced() {
    let corpus = pristine_corpus(41, 5);
    assert!(matches!(
        fit_niqe_model(&corpus, PATCH),
        Err(MetricError::CorpusTooSmall(5, 10))
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let small: Vec<ImageBuffer> = (0..10).map(|_| synth_image(&mut rng, 48, 96)).collect();
    assert!(matches!(
        fit_niqe_model(&small, PATCH),
        Err(MetricError::CorpusImageTooSmall { .. })
    ));
}

#[test]
fn fit_is_order_independent() {
    let corpus = pristine_corpus(43, 11);
    let forward = fit_niqe_model(&corpus, PATCH).unwrap();
    let mut reversed = corpus.clone();
    reversed.reverse();
    let backward = fit_niqe_model(&reversed, PATCH).unwrap();
    for (a, b) in forward.mean().iter().zip(backward.mean()) {
        assert!((a - b).abs() < 1e-12);
    }
    for (a, b) in forward.covariance().iter().zip(backward.covariance()) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn identical_constant_corpus_is_flagged_degenerate() {
    // every pooled patch row is identical, so the covariance vanishes
    let one = ImageBuffer::constant(96, 96, 1, 0.5).unwrap();
    let corpus: Vec<ImageBuffer> = (0..10).map(|_| one.clone()).collect();
    let model = fit_niqe_model(&corpus, PATCH).unwrap();
    assert!(model.is_degenerate());
    assert!(model.covariance().iter().all(|&v| v == 0.0));
}

#[test]
fn duplicated_corpus_keeps_the_model_mean() {
    // duplicating every image leaves the pooled feature mean unchanged
    let corpus = pristine_corpus(44, 10);
    let model = fit_niqe_model(&corpus, PATCH).unwrap();
    let mut doubled = corpus.clone();
    doubled.extend(corpus.iter().cloned());
    let model2 = fit_niqe_model(&doubled, PATCH).unwrap();
    for (a, b) in model.mean().iter().zip(model2.mean()) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn noise_increases_niqe_on_pristine_crops() {
    let model = fitted_model();
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    let noise = Normal::new(0.0, 0.05).unwrap();
    let mut increased = 0;
    let total = 10;
    for _ in 0..total {
        let img = synth_image(&mut rng, 96, 96);
        let luma = LumaPlane::from_image(&img).unwrap();
        let clean = niqe(&luma, &model).unwrap();
        let noisy_data: Vec<f64> = img
            .data()
            .iter()
            .map(|v| (v + noise.sample(&mut rng)).clamp(0.0, 1.0))
            .collect();
        let noisy = LumaPlane::from_data(96, 96, noisy_data).unwrap();
        let score = niqe(&noisy, &model).unwrap();
        if score > clean {
            increased += 1;
        }
    }
    assert!(
        increased >= 9,
        "noise raised NIQE only {increased}/{total} times"
    );
}

#[test]
fn niqe_is_deterministic_and_nonnegative() {
    let model = fitted_model();
    let mut rng = ChaCha8Rng::seed_from_u64(46);
    let img = synth_image(&mut rng, 96, 96);
    let luma = LumaPlane::from_image(&img).unwrap();
    let a = niqe(&luma, &model).unwrap();
    let b = niqe(&luma, &model).unwrap();
    assert_eq!(a, b);
    assert!(a >= 0.0);
}

#[test]
fn image_smaller_than_one_patch_is_rejected() {
    let model = fitted_model();
    let luma = LumaPlane::from_data(16, 16, vec![0.5; 256]).unwrap();
    assert!(matches!(
        niqe(&luma, &model),
        Err(MetricError::ImageTooSmallForNiqe(16, 16, PATCH))
    ));
}

// ---------------------------------------------------------------------------
// evaluate_pair protocol
// ---------------------------------------------------------------------------

fn synth_rgb(rng: &mut ChaCha8Rng, w: usize, h: usize) -> ImageBuffer {
    let planes: Vec<f64> = (0..3)
        .flat_map(|_| synth_image(rng, w, h).into_data())
        .collect();
    ImageBuffer::from_data(w, h, 3, planes).unwrap()
}

#[test]
fn identical_pair_reports_perfect_distortion() {
    let model = fitted_model();
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let img = synth_rgb(&mut rng, 64, 64);
    let protocol = EvalProtocol::default();
    let ma = MaScoreProvider::from_entries([("img".to_string(), 8.0)]).unwrap();
    let report = evaluate_pair(&img, &img, &protocol, &model, Some(&ma), "img").unwrap();
    assert_eq!(report.rmse, 0.0);
    assert!(report.psnr.is_infinite());
    assert_eq!(report.ssim, 1.0);
    // pi = ((10 - ma) + niqe) / 2 of the image itself
    let niqe_self = niqe(&rgb_to_luma(&img).unwrap().crop_border(4).unwrap(), &model).unwrap();
    assert_eq!(report.ma, Some(8.0));
    assert!((report.pi.unwrap() - ((10.0 - 8.0) + niqe_self) / 2.0).abs() < 1e-15);
}

#[test]
fn border_discard_changes_metrics() {
    let model = fitted_model();
    let mut rng = ChaCha8Rng::seed_from_u64(48);
    let hr = synth_rgb(&mut rng, 72, 72);
    // degrade through a bicubic round trip
    let lr = bicubic_resize(&hr, 18, 18, true).unwrap();
    let sr = bicubic_resize(&lr, 72, 72, false).unwrap();
    let with_border = EvalProtocol::new(4, 4, ChannelMode::Luma).unwrap();
    let without = EvalProtocol::new(4, 0, ChannelMode::Luma).unwrap();
    let a = evaluate_pair(&hr, &sr, &with_border, &model, None, "x").unwrap();
    let b = evaluate_pair(&hr, &sr, &without, &model, None, "x").unwrap();
    assert!(a.psnr != b.psnr);
    assert!(a.ma.is_none() && a.pi.is_none());
}

#[test]
fn rgb_channel_mode_differs_from_luma() {
    let model = fitted_model();
    let mut rng = ChaCha8Rng::seed_from_u64(49);
    let hr = synth_rgb(&mut rng, 64, 64);
    let lr = bicubic_resize(&hr, 16, 16, true).unwrap();
    let sr = bicubic_resize(&lr, 64, 64, false).unwrap();
    let luma = evaluate_pair(
        &hr,
        &sr,
        &EvalProtocol::new(4, 4, ChannelMode::Luma).unwrap(),
        &model,
        None,
        "x",
    )
    .unwrap();
    let rgb = evaluate_pair(
        &hr,
        &sr,
        &EvalProtocol::new(4, 4, ChannelMode::Rgb).unwrap(),
        &model,
        None,
        "x",
    )
    .unwrap();
    assert!(luma.rmse != rgb.rmse);
    // NIQE is luma-based in both modes
    assert_eq!(luma.niqe, rgb.niqe);
}

#[test]
fn dim_mismatch_is_rejected() {
    let model = fitted_model();
    let a = ImageBuffer::constant(32, 32, 1, 0.5).unwrap();
    let b = ImageBuffer::constant(30, 32, 1, 0.5).unwrap();
    assert!(matches!(
        evaluate_pair(&a, &b, &EvalProtocol::default(), &model, None, "x"),
        Err(MetricError::ShapeMismatch(..))
    ));
}

#[test]
fn member_errors_propagate_on_tiny_images() {
    // 10x10 with border 4 crops to 2x2: the SSIM window no longer fits
    let model = fitted_model();
    let a = ImageBuffer::constant(10, 10, 1, 0.5).unwrap();
    let err = evaluate_pair(&a, &a, &EvalProtocol::default(), &model, None, "x").unwrap_err();
    assert!(matches!(err, MetricError::ImageTooSmallForSsim(2, 2)));
}
