//! End-to-end tests of the `pcl-srtool` binary: exit codes, output schemas,
//! determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

use pcl_image::{bicubic_resize, save_png, ImageBuffer};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pcl-srtool"));
    cmd.env_remove("PCL_SRTOOL_THREADS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn synth_rgb(rng: &mut ChaCha8Rng, w: usize, h: usize) -> ImageBuffer {
    let mut planes = Vec::with_capacity(w * h * 3);
    for _ in 0..3 {
        let grid: Vec<f64> = (0..64).map(|_| rng.gen()).collect();
        let base = ImageBuffer::from_data(8, 8, 1, grid).unwrap();
        let up = bicubic_resize(&base, w, h, false).unwrap();
        planes.extend(
            up.data()
                .iter()
                .map(|v| (v * 0.7 + 0.15 + rng.gen::<f64>() * 0.1 - 0.05).clamp(0.0, 1.0)),
        );
    }
    ImageBuffer::from_data(w, h, 3, planes).unwrap()
}

/// Five-image dataset plus a ten-image pristine corpus, both 192x192.
struct Fixture {
    #[allow(dead_code)]
    tmp: tempfile::TempDir,
    hr: PathBuf,
    corpus: PathBuf,
    model: PathBuf,
}

fn fixture() -> Fixture {
    let tmp = tempfile::tempdir().unwrap();
    let hr = tmp.path().join("hr");
    let corpus = tmp.path().join("corpus");
    std::fs::create_dir_all(&hr).unwrap();
    std::fs::create_dir_all(&corpus).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    for i in 0..5 {
        save_png(
            &synth_rgb(&mut rng, 192, 192),
            hr.join(format!("img{i}.png")),
        )
        .unwrap();
    }
    for i in 0..10 {
        save_png(
            &synth_rgb(&mut rng, 192, 192),
            corpus.join(format!("pristine{i}.png")),
        )
        .unwrap();
    }
    let model = tmp.path().join("model.txt");
    Fixture {
        tmp,
        hr,
        corpus,
        model,
    }
}

fn fit_model(f: &Fixture) {
    let out = run(&[
        "niqe-fit",
        "--hr",
        f.corpus.to_str().unwrap(),
        "--out",
        f.model.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(f.model.exists());
}

#[test]
fn three_command_flow_is_green_and_json_is_schema_valid() {
    let f = fixture();
    fit_model(&f);

    let out_dir = f.hr.parent().unwrap().join("bicubic");
    let out = run(&[
        "bicubic",
        "--hr",
        f.hr.to_str().unwrap(),
        "--scale",
        "4",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(std::fs::read_dir(&out_dir).unwrap().count(), 5);

    let report_path = f.hr.parent().unwrap().join("report.json");
    let out = run(&[
        "evaluate",
        "--hr",
        f.hr.to_str().unwrap(),
        "--sr",
        out_dir.to_str().unwrap(),
        "--scale",
        "4",
        "--border",
        "4",
        "--niqe-model",
        f.model.to_str().unwrap(),
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let text = std::fs::read_to_string(&report_path).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["dataset", "protocol", "per_image", "mean", "failures"] {
        assert!(doc.get(key).is_some(), "missing {key}");
    }
    assert_eq!(doc["per_image"].as_array().unwrap().len(), 5);
    assert_eq!(doc["failures"].as_array().unwrap().len(), 0);
    // means recompute exactly from the emitted rows
    let rows = doc["per_image"].as_array().unwrap();
    let mean_rmse: f64 = rows
        .iter()
        .map(|r| r["rmse"].as_f64().unwrap())
        .sum::<f64>()
        / rows.len() as f64;
    let mean_rmse = (mean_rmse * 10000.0).round() / 10000.0;
    assert_eq!(doc["mean"]["rmse"].as_f64().unwrap(), mean_rmse);

    // losses on one generated pair
    let pair = out_dir.join("img0.png");
    let out = run(&[
        "losses",
        "--hr",
        pair.to_str().unwrap(),
        "--sr",
        pair.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["l_c"].as_f64().unwrap(), 0.0);
    assert_eq!(doc["l_d"].as_f64().unwrap(), 0.0);
    assert_eq!(doc["l_dct"].as_f64().unwrap(), 0.0);
    assert_eq!(doc["total"].as_f64().unwrap(), 0.0);
}

#[test]
fn ma_sidecar_enables_perceptual_index() {
    let f = fixture();
    fit_model(&f);
    // scores for three of the five stems; the other two stay null
    let ma_path = f.hr.parent().unwrap().join("ma.csv");
    std::fs::write(
        &ma_path,
        "image_id,score\nimg0,7.5\nimg1,6.25\nimg3,8.0\n",
    )
    .unwrap();
    let out = run(&[
        "evaluate",
        "--hr",
        f.hr.to_str().unwrap(),
        "--sr",
        f.hr.to_str().unwrap(),
        "--niqe-model",
        f.model.to_str().unwrap(),
        "--ma-scores",
        ma_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = doc["per_image"].as_array().unwrap();
    let row0 = &rows[0];
    assert_eq!(row0["image"].as_str().unwrap(), "img0");
    assert_eq!(row0["ma"].as_f64().unwrap(), 7.5);
    let niqe0 = row0["niqe"].as_f64().unwrap();
    let pi0 = row0["pi"].as_f64().unwrap();
    // pi = ((10 - ma) + niqe) / 2 at report rounding
    let want = (((10.0 - 7.5) + niqe0) / 2.0 * 10000.0).round() / 10000.0;
    assert!((pi0 - want).abs() <= 1e-4, "pi {pi0} vs {want}");
    assert!(rows[2]["ma"].is_null());
    assert!(rows[2]["pi"].is_null());
    assert!(doc["mean"]["ma"].as_f64().is_some());
    assert!(doc["mean"]["pi"].as_f64().is_some());
}

#[test]
fn evaluate_identical_dirs_reports_zero_rmse() {
    let f = fixture();
    fit_model(&f);
    let out = run(&[
        "evaluate",
        "--hr",
        f.hr.to_str().unwrap(),
        "--sr",
        f.hr.to_str().unwrap(),
        "--scale",
        "4",
        "--border",
        "4",
        "--niqe-model",
        f.model.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["mean"]["rmse"].as_f64().unwrap(), 0.0);
    assert_eq!(doc["mean"]["ssim"].as_f64().unwrap(), 1.0);
    // identical pairs have infinite PSNR: emitted as null + counted
    assert!(doc["mean"]["psnr"].is_null());
    assert_eq!(doc["mean"]["psnr_infinite_count"].as_u64().unwrap(), 5);
    assert!(doc["per_image"][0]["psnr"].is_null());
}

#[test]
fn evaluate_is_byte_deterministic() {
    let f = fixture();
    fit_model(&f);
    let args = [
        "evaluate",
        "--hr",
        f.hr.to_str().unwrap(),
        "--sr",
        f.hr.to_str().unwrap(),
        "--niqe-model",
        f.model.to_str().unwrap(),
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    // and under a different thread cap
    let c = bin()
        .args(args)
        .env("PCL_SRTOOL_THREADS", "1")
        .output()
        .unwrap();
    assert!(c.status.success());
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn usage_errors_exit_one() {
    let out = run(&["evaluate", "--definitely-not-a-flag"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&[
        "losses",
        "--hr",
        "a.png",
        "--sr",
        "b.png",
        "--weights",
        "1,2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    // scale below 2 is a usage error, caught before any file I/O
    let f = fixture();
    let out = run(&[
        "bicubic",
        "--hr",
        f.hr.to_str().unwrap(),
        "--scale",
        "1",
        "--out",
        f.hr.parent().unwrap().join("x").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = bin().args(["--help"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn data_errors_exit_two() {
    let f = fixture();
    fit_model(&f);
    let out = run(&[
        "evaluate",
        "--hr",
        "/nonexistent/hr",
        "--sr",
        "/nonexistent/sr",
        "--niqe-model",
        f.model.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "losses",
        "--hr",
        "/nonexistent/a.png",
        "--sr",
        "/nonexistent/b.png",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numeric_failures_exit_three() {
    // a model whose covariance is negative definite defeats the ridge
    let f = fixture();
    let mut text = String::from("NIQE-MODEL v1\npatch_size 96\nfeature_dim 36\n");
    text.push_str(&vec!["0"; 36].join(" "));
    text.push('\n');
    for i in 0..36 {
        let row: Vec<String> = (0..36)
            .map(|j| {
                if i == j {
                    "-1".to_string()
                } else {
                    "0".to_string()
                }
            })
            .collect();
        text.push_str(&row.join(" "));
        text.push('\n');
    }
    std::fs::write(&f.model, text).unwrap();
    let out = run(&[
        "evaluate",
        "--hr",
        f.hr.to_str().unwrap(),
        "--sr",
        f.hr.to_str().unwrap(),
        "--niqe-model",
        f.model.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn bad_thread_env_exits_one() {
    let f = fixture();
    let out = bin()
        .args([
            "niqe-fit",
            "--hr",
            f.corpus.to_str().unwrap(),
            "--out",
            f.model.to_str().unwrap(),
        ])
        .env("PCL_SRTOOL_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn pd_sweep_writes_sweep_csv_and_traces() {
    let tmp = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(501);
    // small gray pair plus a patch-8 model fit through the library
    let hr = synth_rgb(&mut rng, 16, 16);
    let lr = bicubic_resize(&hr, 4, 4, true).unwrap();
    let start = bicubic_resize(&lr, 16, 16, false).unwrap();
    let hr_path = tmp.path().join("hr.png");
    let start_path = tmp.path().join("start.png");
    save_png(&hr, &hr_path).unwrap();
    save_png(&start, &start_path).unwrap();
    let corpus: Vec<ImageBuffer> = (0..10).map(|_| synth_rgb(&mut rng, 32, 32)).collect();
    let model = pcl_metrics::fit_niqe_model(&corpus, 8).unwrap();
    let model_path = tmp.path().join("m8.txt");
    model.save(&model_path).unwrap();

    let out_dir = tmp.path().join("sweep");
    let out = run(&[
        "pd-sweep",
        "--hr",
        hr_path.to_str().unwrap(),
        "--sr",
        start_path.to_str().unwrap(),
        "--weights",
        "1,0,0,0",
        "--weights",
        "1,1,1,0",
        "--niqe-model",
        model_path.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "w_c,w_d,w_dct,w_adv,rmse,niqe,steps,error");
    assert_eq!(lines.len(), 3);
    assert!(out_dir.join("trace_000.csv").exists());
    assert!(out_dir.join("trace_001.csv").exists());
    let trace = std::fs::read_to_string(out_dir.join("trace_000.csv")).unwrap();
    assert!(trace.starts_with("step,objective\n0,"));
}
