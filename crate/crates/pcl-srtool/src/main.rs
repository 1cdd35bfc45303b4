use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pcl_explorer::{sweep, DescentConfig, ExplorerError};
use pcl_image::{load_png, ChannelMode, EvalProtocol};
use pcl_losses::{
    combined_loss, DctConfig, DctMode, DctNormalization, LossError, LossWeights, SmoothingEps,
};
use pcl_metrics::{fit_niqe_model, MaScoreProvider, MetricError, NiqeModel};
use pcl_srtool::{
    evaluate_dataset, make_bicubic_baseline, render_csv, render_json, scan_dataset, HarnessError,
};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(
    name = "pcl-srtool",
    version,
    about = "Super-resolution evaluation toolkit: losses, metrics, bicubic baselines, PD sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChannelArg {
    /// Y channel of YCbCr (benchmark convention)
    Y,
    /// RGB channels directly
    Rgb,
}

impl From<ChannelArg> for ChannelMode {
    fn from(c: ChannelArg) -> Self {
        match c {
            ChannelArg::Y => ChannelMode::Luma,
            ChannelArg::Rgb => ChannelMode::Rgb,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum DctNormArg {
    /// Orthonormal scaling
    Ortho,
    /// Unnormalized type-II sums
    Raw,
}

#[derive(Clone, Copy, ValueEnum)]
enum DctBlockArg {
    /// One transform over the whole image
    Full,
    /// Independent 8x8 tiles
    #[value(name = "8")]
    Eight,
}

fn dct_config(norm: DctNormArg, block: DctBlockArg) -> DctConfig {
    DctConfig {
        normalization: match norm {
            DctNormArg::Ortho => DctNormalization::Orthonormal,
            DctNormArg::Raw => DctNormalization::UnnormalizedTypeII,
        },
        mode: match block {
            DctBlockArg::Full => DctMode::FullImage,
            DctBlockArg::Eight => DctMode::Blockwise8x8,
        },
    }
}

fn parse_weights(s: &str) -> Result<LossWeights, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!(
            "expected wc,wd,wdct,wadv (4 comma-separated values), got {} field(s)",
            parts.len()
        ));
    }
    let mut vals = [0.0f64; 4];
    for (v, p) in vals.iter_mut().zip(&parts) {
        *v = p
            .trim()
            .parse()
            .map_err(|e| format!("bad weight {p:?}: {e}"))?;
    }
    LossWeights::new(vals[0], vals[1], vals[2], vals[3]).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an SR directory against an HR directory
    Evaluate {
        /// Directory of HR (ground truth) PNGs
        #[arg(long)]
        hr: PathBuf,
        /// Directory of SR PNGs with matching file stems
        #[arg(long)]
        sr: PathBuf,
        /// Upscaling factor of the SR method
        #[arg(long, default_value_t = 4)]
        scale: usize,
        /// Pixels discarded from every border before computing metrics
        #[arg(long, default_value_t = 4)]
        border: usize,
        #[arg(long, value_enum, default_value_t = ChannelArg::Y)]
        channel: ChannelArg,
        /// NIQE pristine model file
        #[arg(long = "niqe-model")]
        niqe_model: PathBuf,
        /// Optional CSV sidecar of Ma scores (image_id,score)
        #[arg(long = "ma-scores")]
        ma_scores: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Loss report for one HR/SR image pair
    Losses {
        #[arg(long)]
        hr: PathBuf,
        #[arg(long)]
        sr: PathBuf,
        /// wc,wd,wdct,wadv
        #[arg(long, value_parser = parse_weights)]
        weights: Option<LossWeights>,
        #[arg(long = "dct-norm", value_enum, default_value_t = DctNormArg::Raw)]
        dct_norm: DctNormArg,
        #[arg(long = "dct-block", value_enum, default_value_t = DctBlockArg::Full)]
        dct_block: DctBlockArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate bicubic baseline SR images for every HR PNG
    Bicubic {
        #[arg(long)]
        hr: PathBuf,
        #[arg(long, default_value_t = 4)]
        scale: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Descend the weighted objective from a start image, one run per weight setting
    PdSweep {
        /// Target HR PNG
        #[arg(long)]
        hr: PathBuf,
        /// Start image (e.g. a bicubic upscale)
        #[arg(long)]
        sr: PathBuf,
        /// Repeatable: wc,wd,wdct,wadv per sweep point
        #[arg(long = "weights", value_parser = parse_weights, required = true)]
        weights: Vec<LossWeights>,
        #[arg(long = "niqe-model")]
        niqe_model: PathBuf,
        /// Output directory for sweep.csv and per-run traces
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "dct-norm", value_enum, default_value_t = DctNormArg::Raw)]
        dct_norm: DctNormArg,
        #[arg(long = "dct-block", value_enum, default_value_t = DctBlockArg::Full)]
        dct_block: DctBlockArg,
    },
    /// Fit a NIQE pristine model from a directory of PNGs
    NiqeFit {
        /// Directory of pristine images (>= 10, each side >= 192)
        #[arg(long)]
        hr: PathBuf,
        /// Model file to write
        #[arg(long)]
        out: PathBuf,
    },
}

struct AppError {
    code: u8,
    message: String,
}

impl AppError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

fn classify_metric(e: &MetricError) -> u8 {
    match e {
        MetricError::SingularCovariance | MetricError::NegativeNiqe(_) => EXIT_NUMERIC,
        _ => EXIT_DATA,
    }
}

impl From<MetricError> for AppError {
    fn from(e: MetricError) -> Self {
        Self {
            code: classify_metric(&e),
            message: e.to_string(),
        }
    }
}

impl From<LossError> for AppError {
    fn from(e: LossError) -> Self {
        let code = match e {
            LossError::DivergedLoss => EXIT_NUMERIC,
            _ => EXIT_DATA,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<ExplorerError> for AppError {
    fn from(e: ExplorerError) -> Self {
        let code = match &e {
            ExplorerError::NonFiniteGradient { .. } => EXIT_NUMERIC,
            ExplorerError::InvalidConfig(_) => EXIT_USAGE,
            ExplorerError::Loss(inner) => return AppError::from_loss_ref(inner, e.to_string()),
            ExplorerError::Metric(inner) => {
                return AppError {
                    code: classify_metric(inner),
                    message: e.to_string(),
                }
            }
            ExplorerError::Image(_) => EXIT_DATA,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl AppError {
    fn from_loss_ref(e: &LossError, message: String) -> Self {
        let code = match e {
            LossError::DivergedLoss => EXIT_NUMERIC,
            _ => EXIT_DATA,
        };
        Self { code, message }
    }
}

impl From<HarnessError> for AppError {
    fn from(e: HarnessError) -> Self {
        fn code_of(e: &HarnessError) -> u8 {
            match e {
                HarnessError::Metric(inner) => classify_metric(inner),
                HarnessError::BadScale(_) => EXIT_USAGE,
                HarnessError::NoSuccessfulPairs { first, .. } => code_of(first),
                _ => EXIT_DATA,
            }
        }
        Self {
            code: code_of(&e),
            message: e.to_string(),
        }
    }
}

impl From<pcl_image::ImageError> for AppError {
    fn from(e: pcl_image::ImageError) -> Self {
        Self {
            code: EXIT_DATA,
            message: e.to_string(),
        }
    }
}

fn init_thread_pool() -> Result<(), AppError> {
    match std::env::var("PCL_SRTOOL_THREADS") {
        Ok(v) => {
            let n: usize = v.parse().map_err(|_| {
                AppError::usage(format!(
                    "PCL_SRTOOL_THREADS must be a positive integer, got {v:?}"
                ))
            })?;
            if n == 0 {
                return Err(AppError::usage("PCL_SRTOOL_THREADS must be at least 1"));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| AppError::usage(format!("failed to configure thread pool: {e}")))
        }
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(e) => Err(AppError::usage(format!("PCL_SRTOOL_THREADS: {e}"))),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), AppError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| AppError {
            code: EXIT_DATA,
            message: format!("cannot write {}: {e}", path.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_f64(v: f64) -> String {
    serde_json::to_string(&v).expect("finite float")
}

fn json_opt(v: Option<f64>) -> String {
    v.map(json_f64).unwrap_or_else(|| "null".to_string())
}

#[allow(clippy::too_many_arguments)]
fn run_evaluate(
    hr: &Path,
    sr: &Path,
    scale: usize,
    border: usize,
    channel: ChannelArg,
    niqe_model: &Path,
    ma_scores: Option<&Path>,
    format: FormatArg,
    out: Option<&Path>,
) -> Result<(), AppError> {
    if scale == 0 {
        return Err(AppError::usage("scale must be positive"));
    }
    let protocol = EvalProtocol::new(scale, border, channel.into())?;
    let model = NiqeModel::load(niqe_model)?;
    let ma = ma_scores.map(MaScoreProvider::from_csv_path).transpose()?;
    let manifest = scan_dataset(hr, sr)?;
    for stem in &manifest.unmatched_hr {
        eprintln!("warning: HR image {stem} has no SR counterpart");
    }
    for stem in &manifest.unmatched_sr {
        eprintln!("warning: SR image {stem} has no HR counterpart");
    }
    let report = evaluate_dataset(&manifest, &protocol, &model, ma.as_ref())?;
    if !report.failures.is_empty() {
        eprintln!(
            "warning: {} pair(s) failed to evaluate",
            report.failures.len()
        );
    }
    let rendered = match format {
        FormatArg::Json => render_json(&report),
        FormatArg::Csv => render_csv(&report),
    };
    emit(&rendered, out)
}

fn run_losses(
    hr: &Path,
    sr: &Path,
    weights: Option<LossWeights>,
    dct: DctConfig,
    format: FormatArg,
    out: Option<&Path>,
) -> Result<(), AppError> {
    let hr_img = load_png(hr)?;
    let sr_img = load_png(sr)?;
    let mut weights = weights.unwrap_or_default();
    if weights.w_adv > 0.0 {
        eprintln!(
            "note: no discriminator output at the CLI; ignoring adversarial weight {}",
            weights.w_adv
        );
        weights.w_adv = 0.0;
        if weights.w_c == 0.0 && weights.w_d == 0.0 && weights.w_dct == 0.0 {
            return Err(AppError::usage(
                "weights reduce to zero once the adversarial term is dropped",
            ));
        }
    }
    let (report, _) = combined_loss(&hr_img, &sr_img, &weights, &dct, SmoothingEps::EXACT, None)?;
    let rendered = match format {
        FormatArg::Json => format!(
            "{{\n  \"l_c\": {},\n  \"l_d\": {},\n  \"l_dct\": {},\n  \"l_adv\": {},\n  \"total\": {},\n  \"weights\": [{}, {}, {}, {}]\n}}\n",
            json_f64(report.l_c),
            json_f64(report.l_d),
            json_f64(report.l_dct),
            json_opt(report.l_adv),
            json_f64(report.total),
            json_f64(weights.w_c),
            json_f64(weights.w_d),
            json_f64(weights.w_dct),
            json_f64(weights.w_adv),
        ),
        FormatArg::Csv => format!(
            "l_c,l_d,l_dct,l_adv,total\n{},{},{},{},{}\n",
            report.l_c,
            report.l_d,
            report.l_dct,
            report.l_adv.map(|v| v.to_string()).unwrap_or_default(),
            report.total,
        ),
    };
    emit(&rendered, out)
}

fn run_bicubic(hr: &Path, scale: usize, out: &Path) -> Result<(), AppError> {
    let outcome = make_bicubic_baseline(hr, scale, out)?;
    for (stem, error) in &outcome.failures {
        eprintln!("warning: {stem}: {error}");
    }
    println!(
        "wrote {} baseline image(s) to {}",
        outcome.written,
        out.display()
    );
    if outcome.written == 0 {
        return Err(AppError {
            code: EXIT_DATA,
            message: "no baseline image could be generated".into(),
        });
    }
    Ok(())
}

fn run_pd_sweep(
    hr: &Path,
    sr: &Path,
    weights: &[LossWeights],
    niqe_model: &Path,
    out: &Path,
    dct: DctConfig,
) -> Result<(), AppError> {
    let hr_img = load_png(hr)?;
    let start = load_png(sr)?;
    let model = NiqeModel::load(niqe_model)?;
    let cfg = DescentConfig::default();
    let result = sweep(&hr_img, &start, weights, &cfg, &dct, &model)?;
    std::fs::create_dir_all(out).map_err(|e| AppError {
        code: EXIT_DATA,
        message: format!("cannot create {}: {e}", out.display()),
    })?;
    let mut csv = String::from("w_c,w_d,w_dct,w_adv,rmse,niqe,steps,error\n");
    for (i, entry) in result.entries.iter().enumerate() {
        let w = entry.weights;
        match &entry.outcome {
            Ok(point) => {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},\n",
                    w.w_c, w.w_d, w.w_dct, w.w_adv, point.rmse, point.niqe, point.steps
                ));
                let mut trace = String::from("step,objective\n");
                for (step, obj) in point.trace.iter().enumerate() {
                    trace.push_str(&format!("{step},{obj}\n"));
                }
                let trace_path = out.join(format!("trace_{i:03}.csv"));
                std::fs::write(&trace_path, trace).map_err(|e| AppError {
                    code: EXIT_DATA,
                    message: format!("cannot write {}: {e}", trace_path.display()),
                })?;
            }
            Err(error) => {
                eprintln!("warning: sweep point {i} failed: {error}");
                csv.push_str(&format!(
                    "{},{},{},{},,,,{}\n",
                    w.w_c,
                    w.w_d,
                    w.w_dct,
                    w.w_adv,
                    error.replace(',', ";")
                ));
            }
        }
    }
    let csv_path = out.join("sweep.csv");
    std::fs::write(&csv_path, csv).map_err(|e| AppError {
        code: EXIT_DATA,
        message: format!("cannot write {}: {e}", csv_path.display()),
    })?;
    println!(
        "wrote {} sweep point(s) to {}",
        result.entries.len(),
        csv_path.display()
    );
    Ok(())
}

fn run_niqe_fit(hr: &Path, out: &Path) -> Result<(), AppError> {
    let entries = std::fs::read_dir(hr).map_err(|e| AppError {
        code: EXIT_DATA,
        message: format!("cannot read {}: {e}", hr.display()),
    })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| e.eq_ignore_ascii_case("png"))
        })
        .collect();
    paths.sort();
    let mut corpus = Vec::with_capacity(paths.len());
    for p in &paths {
        corpus.push(load_png(p)?);
    }
    let model = fit_niqe_model(&corpus, 96)?;
    if model.is_degenerate() {
        eprintln!("warning: fitted covariance is identically zero (degenerate corpus)");
    }
    model.save(out)?;
    println!(
        "fitted NIQE model from {} image(s); wrote {}",
        corpus.len(),
        out.display()
    );
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Evaluate {
            hr,
            sr,
            scale,
            border,
            channel,
            niqe_model,
            ma_scores,
            format,
            out,
        } => run_evaluate(
            &hr,
            &sr,
            scale,
            border,
            channel,
            &niqe_model,
            ma_scores.as_deref(),
            format,
            out.as_deref(),
        ),
        Command::Losses {
            hr,
            sr,
            weights,
            dct_norm,
            dct_block,
            format,
            out,
        } => run_losses(
            &hr,
            &sr,
            weights,
            dct_config(dct_norm, dct_block),
            format,
            out.as_deref(),
        ),
        Command::Bicubic { hr, scale, out } => run_bicubic(&hr, scale, &out),
        Command::PdSweep {
            hr,
            sr,
            weights,
            niqe_model,
            out,
            dct_norm,
            dct_block,
        } => run_pd_sweep(
            &hr,
            &sr,
            &weights,
            &niqe_model,
            &out,
            dct_config(dct_norm, dct_block),
        ),
        Command::NiqeFit { hr, out } => run_niqe_fit(&hr, &out),
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = init_thread_pool() {
        eprintln!("error: {}", e.message);
        return ExitCode::from(e.code);
    }
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
