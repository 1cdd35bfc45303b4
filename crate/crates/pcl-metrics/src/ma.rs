use std::collections::HashMap;
use std::path::Path;

use crate::{MetricError, Result};

/// Lookup table of externally computed Ma scores, keyed by image identifier
/// (file stem). Loaded from a `image_id,score` CSV sidecar.
#[derive(Debug, Clone, Default)]
pub struct MaScoreProvider {
    scores: HashMap<String, f64>,
}

impl MaScoreProvider {
    pub fn from_entries(entries: impl IntoIterator<Item = (String, f64)>) -> Result<Self> {
        let mut scores = HashMap::new();
        for (id, score) in entries {
            check_score(score)?;
            scores.insert(id, score);
        }
        Ok(Self { scores })
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let err = |reason: String| MetricError::MaSidecar {
            path: path.to_path_buf(),
            reason,
        };
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| err(e.to_string()))?;
        let mut scores = HashMap::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| err(e.to_string()))?;
            if record.len() != 2 {
                return Err(err(format!(
                    "row {i}: expected 2 fields, got {}",
                    record.len()
                )));
            }
            let id = record[0].to_string();
            match record[1].parse::<f64>() {
                Ok(score) => {
                    check_score(score)?;
                    scores.insert(id, score);
                }
                // a non-numeric first row is treated as the header
                Err(_) if i == 0 => continue,
                Err(e) => return Err(err(format!("row {i}: bad score: {e}"))),
            }
        }
        Ok(Self { scores })
    }

    /// Resolves an identifier; `None` means "score unavailable".
    pub fn score(&self, image_id: &str) -> Option<f64> {
        self.scores.get(image_id).copied()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

fn check_score(score: f64) -> Result<()> {
    if !(0.0..=10.0).contains(&score) {
        return Err(MetricError::MaOutOfRange(score));
    }
    Ok(())
}
