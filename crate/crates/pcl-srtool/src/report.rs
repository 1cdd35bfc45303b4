use pcl_image::{load_png, ChannelMode, EvalProtocol, ImageBuffer};
use pcl_metrics::{evaluate_pair, MaScoreProvider, MetricReport, NiqeModel};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{round4, DatasetManifest, HarnessError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PairRecord {
    pub stem: String,
    pub report: MetricReport,
}

/// Full-precision per-metric means. `psnr` excludes infinite entries
/// (`psnr_infinite_count` of them); `ma`/`pi` average the pairs whose Ma
/// score resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanMetrics {
    pub rmse: f64,
    pub psnr: Option<f64>,
    pub ssim: f64,
    pub niqe: f64,
    pub ma: Option<f64>,
    pub pi: Option<f64>,
    pub psnr_infinite_count: usize,
    pub ma_count: usize,
}

#[derive(Debug, Clone)]
pub struct AggregateReport {
    pub dataset: String,
    pub protocol: EvalProtocol,
    pub per_image: Vec<PairRecord>,
    pub mean: MeanMetrics,
    pub failures: Vec<(String, String)>,
}

/// Accepts an HR that is exactly the un-modcropped original: every dimension
/// may exceed the SR by less than `scale`, in which case the HR is
/// center-cropped to the SR dimensions.
fn align_hr(hr: ImageBuffer, sr: &ImageBuffer, stem: &str, scale: usize) -> Result<ImageBuffer> {
    if hr.width() == sr.width() && hr.height() == sr.height() {
        return Ok(hr);
    }
    let fits = hr.width() >= sr.width()
        && hr.height() >= sr.height()
        && hr.width() - sr.width() < scale
        && hr.height() - sr.height() < scale;
    if !fits {
        return Err(HarnessError::PairDimMismatch {
            stem: stem.to_string(),
            hr_w: hr.width(),
            hr_h: hr.height(),
            sr_w: sr.width(),
            sr_h: sr.height(),
            scale,
        });
    }
    Ok(hr.center_crop(sr.width(), sr.height())?)
}

/// Evaluates every pair of a manifest (in parallel) and aggregates means.
/// Per-pair failures are recorded with the pair stem; the aggregate covers
/// the successes.
pub fn evaluate_dataset(
    manifest: &DatasetManifest,
    protocol: &EvalProtocol,
    model: &NiqeModel,
    ma: Option<&MaScoreProvider>,
) -> Result<AggregateReport> {
    let results: Vec<std::result::Result<PairRecord, (String, HarnessError)>> = manifest
        .pairs
        .par_iter()
        .map(|pair| {
            let run = || -> Result<MetricReport> {
                let hr = load_png(&pair.hr)?;
                let sr = load_png(&pair.sr)?;
                let hr = align_hr(hr, &sr, &pair.stem, protocol.scale)?;
                Ok(evaluate_pair(&hr, &sr, protocol, model, ma, &pair.stem)?)
            };
            match run() {
                Ok(report) => Ok(PairRecord {
                    stem: pair.stem.clone(),
                    report,
                }),
                Err(e) => Err((pair.stem.clone(), e)),
            }
        })
        .collect();

    let mut per_image = Vec::new();
    let mut failures = Vec::new();
    let mut first_error = None;
    for r in results {
        match r {
            Ok(rec) => per_image.push(rec),
            Err((stem, e)) => {
                failures.push((stem, e.to_string()));
                if first_error.is_none() {
                    first_error = Some(e);
                }
            }
        }
    }
    if per_image.is_empty() {
        return Err(HarnessError::NoSuccessfulPairs {
            count: failures.len(),
            first: Box::new(first_error.expect("at least one pair failed")),
        });
    }
    let mean = aggregate(&per_image);
    Ok(AggregateReport {
        dataset: manifest.name.clone(),
        protocol: *protocol,
        per_image,
        mean,
        failures,
    })
}

fn aggregate(records: &[PairRecord]) -> MeanMetrics {
    let n = records.len() as f64;
    let rmse = records.iter().map(|r| r.report.rmse).sum::<f64>() / n;
    let ssim = records.iter().map(|r| r.report.ssim).sum::<f64>() / n;
    let niqe = records.iter().map(|r| r.report.niqe).sum::<f64>() / n;
    let finite_psnr: Vec<f64> = records
        .iter()
        .map(|r| r.report.psnr)
        .filter(|p| p.is_finite())
        .collect();
    let psnr_infinite_count = records.len() - finite_psnr.len();
    let psnr = if finite_psnr.is_empty() {
        None
    } else {
        Some(finite_psnr.iter().sum::<f64>() / finite_psnr.len() as f64)
    };
    let mas: Vec<f64> = records.iter().filter_map(|r| r.report.ma).collect();
    let pis: Vec<f64> = records.iter().filter_map(|r| r.report.pi).collect();
    let ma_count = mas.len();
    let ma = (!mas.is_empty()).then(|| mas.iter().sum::<f64>() / mas.len() as f64);
    let pi = (!pis.is_empty()).then(|| pis.iter().sum::<f64>() / pis.len() as f64);
    MeanMetrics {
        rmse,
        psnr,
        ssim,
        niqe,
        ma,
        pi,
        psnr_infinite_count,
        ma_count,
    }
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

/// Serialized report schema. Values carry 4 decimal places; an infinite PSNR
/// is emitted as null and counted in `mean.psnr_infinite_count`. The emitted
/// means are the arithmetic means of the emitted (rounded) per-image rows,
/// re-rounded, so external recomputation from the rows is exact.
#[derive(Debug, Serialize, Deserialize)]
pub struct ReportDoc {
    pub dataset: String,
    pub protocol: ProtocolDoc,
    pub per_image: Vec<RowDoc>,
    pub mean: MeanDoc,
    pub failures: Vec<FailureDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ProtocolDoc {
    pub scale: usize,
    pub border: usize,
    pub channel: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RowDoc {
    pub image: String,
    pub rmse: f64,
    pub psnr: Option<f64>,
    pub ssim: f64,
    pub niqe: f64,
    pub ma: Option<f64>,
    pub pi: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MeanDoc {
    pub rmse: f64,
    pub psnr: Option<f64>,
    pub ssim: f64,
    pub niqe: f64,
    pub ma: Option<f64>,
    pub pi: Option<f64>,
    pub psnr_infinite_count: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FailureDoc {
    pub image: String,
    pub error: String,
}

fn mean_of(vals: impl Iterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = vals.collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

pub fn to_doc(report: &AggregateReport) -> ReportDoc {
    let rows: Vec<RowDoc> = report
        .per_image
        .iter()
        .map(|r| RowDoc {
            image: r.stem.clone(),
            rmse: round4(r.report.rmse),
            psnr: r.report.psnr.is_finite().then(|| round4(r.report.psnr)),
            ssim: round4(r.report.ssim),
            niqe: round4(r.report.niqe),
            ma: r.report.ma.map(round4),
            pi: r.report.pi.map(round4),
        })
        .collect();
    let mean = MeanDoc {
        rmse: round4(mean_of(rows.iter().map(|r| r.rmse)).unwrap_or(f64::NAN)),
        psnr: mean_of(rows.iter().filter_map(|r| r.psnr)).map(round4),
        ssim: round4(mean_of(rows.iter().map(|r| r.ssim)).unwrap_or(f64::NAN)),
        niqe: round4(mean_of(rows.iter().map(|r| r.niqe)).unwrap_or(f64::NAN)),
        ma: mean_of(rows.iter().filter_map(|r| r.ma)).map(round4),
        pi: mean_of(rows.iter().filter_map(|r| r.pi)).map(round4),
        psnr_infinite_count: report.mean.psnr_infinite_count,
    };
    ReportDoc {
        dataset: report.dataset.clone(),
        protocol: ProtocolDoc {
            scale: report.protocol.scale,
            border: report.protocol.border_discard,
            channel: match report.protocol.channel_mode {
                ChannelMode::Luma => "y".to_string(),
                ChannelMode::Rgb => "rgb".to_string(),
            },
        },
        per_image: rows,
        mean,
        failures: report
            .failures
            .iter()
            .map(|(image, error)| FailureDoc {
                image: image.clone(),
                error: error.clone(),
            })
            .collect(),
    }
}

pub fn render_json(report: &AggregateReport) -> String {
    let mut s =
        serde_json::to_string_pretty(&to_doc(report)).expect("report serialization is infallible");
    s.push('\n');
    s
}

fn csv_cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

pub fn render_csv(report: &AggregateReport) -> String {
    let doc = to_doc(report);
    let mut out = String::from("image,rmse,psnr,ssim,niqe,ma,pi\n");
    for r in &doc.per_image {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.image,
            r.rmse,
            csv_cell(r.psnr),
            r.ssim,
            r.niqe,
            csv_cell(r.ma),
            csv_cell(r.pi),
        ));
    }
    out.push_str(&format!(
        "mean,{},{},{},{},{},{}\n",
        doc.mean.rmse,
        csv_cell(doc.mean.psnr),
        doc.mean.ssim,
        doc.mean.niqe,
        csv_cell(doc.mean.ma),
        csv_cell(doc.mean.pi),
    ));
    out
}
