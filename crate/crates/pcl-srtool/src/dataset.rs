use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use pcl_image::{bicubic_resize, load_png, save_png, ImageBuffer};

use crate::{HarnessError, Result};

/// One matched HR/SR pair, keyed by the shared file stem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairPaths {
    pub stem: String,
    pub hr: PathBuf,
    pub sr: PathBuf,
}

/// Stem-matched dataset with deterministic (lexicographic) ordering.
#[derive(Debug, Clone)]
pub struct DatasetManifest {
    pub name: String,
    pub pairs: Vec<PairPaths>,
    pub unmatched_hr: Vec<String>,
    pub unmatched_sr: Vec<String>,
}

fn png_stems(dir: &Path) -> Result<BTreeMap<String, PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|source| HarnessError::DirRead {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut map = BTreeMap::new();
    for entry in entries {
        let entry = entry.map_err(|source| HarnessError::DirRead {
            path: dir.to_path_buf(),
            source,
        })?;
        let path = entry.path();
        let is_png = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if !is_png {
            continue;
        }
        if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
            map.insert(stem.to_string(), path);
        }
    }
    Ok(map)
}

/// Pairs HR and SR files by stem. Unmatched stems on either side are
/// reported, not fatal; an empty intersection is an error.
pub fn scan_dataset(hr_dir: impl AsRef<Path>, sr_dir: impl AsRef<Path>) -> Result<DatasetManifest> {
    let (hr_dir, sr_dir) = (hr_dir.as_ref(), sr_dir.as_ref());
    let hr = png_stems(hr_dir)?;
    let mut sr = png_stems(sr_dir)?;
    let mut pairs = Vec::new();
    let mut unmatched_hr = Vec::new();
    for (stem, hr_path) in hr {
        match sr.remove(&stem) {
            Some(sr_path) => pairs.push(PairPaths {
                stem,
                hr: hr_path,
                sr: sr_path,
            }),
            None => unmatched_hr.push(stem),
        }
    }
    let unmatched_sr: Vec<String> = sr.into_keys().collect();
    if pairs.is_empty() {
        return Err(HarnessError::EmptyIntersection(
            hr_dir.to_path_buf(),
            sr_dir.to_path_buf(),
        ));
    }
    let name = hr_dir
        .file_name()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset")
        .to_string();
    Ok(DatasetManifest {
        name,
        pairs,
        unmatched_hr,
        unmatched_sr,
    })
}

#[derive(Debug, Clone, Default)]
pub struct BaselineOutcome {
    pub written: usize,
    /// (stem, error) per file that failed; the run continues past them.
    pub failures: Vec<(String, String)>,
}

/// In-memory equivalent of an 8-bit PNG round trip.
fn quantize8(img: &ImageBuffer) -> ImageBuffer {
    let data: Vec<f64> = img
        .data()
        .iter()
        .map(|v| (v * 255.0).round().clamp(0.0, 255.0) / 255.0)
        .collect();
    ImageBuffer::from_data(img.width(), img.height(), img.channels(), data)
        .expect("quantization preserves shape and range")
}

/// Generates the bicubic upscaling baseline for every HR PNG in a directory:
/// center-crop to dimensions divisible by `scale`, bicubic downscale with
/// antialiasing, 8-bit quantization of the low-resolution image, bicubic
/// upscale, written as 8-bit PNG under the same stem.
pub fn make_bicubic_baseline(
    hr_dir: impl AsRef<Path>,
    scale: usize,
    out_dir: impl AsRef<Path>,
) -> Result<BaselineOutcome> {
    let (hr_dir, out_dir) = (hr_dir.as_ref(), out_dir.as_ref());
    if scale < 2 {
        return Err(HarnessError::BadScale(scale));
    }
    let stems = png_stems(hr_dir)?;
    std::fs::create_dir_all(out_dir).map_err(|source| HarnessError::DirRead {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut outcome = BaselineOutcome::default();
    for (stem, path) in stems {
        let result = (|| -> Result<()> {
            let hr = load_png(&path)?;
            let (cw, ch) = ((hr.width() / scale) * scale, (hr.height() / scale) * scale);
            if cw == 0 || ch == 0 {
                return Err(HarnessError::HrTooSmall {
                    stem: stem.clone(),
                    width: hr.width(),
                    height: hr.height(),
                    scale,
                });
            }
            let cropped = hr.center_crop(cw, ch)?;
            let lr = bicubic_resize(&cropped, cw / scale, ch / scale, true)?;
            let lr = quantize8(&lr);
            let baseline = bicubic_resize(&lr, cw, ch, false)?;
            save_png(&baseline, out_dir.join(format!("{stem}.png")))?;
            Ok(())
        })();
        match result {
            Ok(()) => outcome.written += 1,
            Err(e) => outcome.failures.push((stem, e.to_string())),
        }
    }
    Ok(outcome)
}
