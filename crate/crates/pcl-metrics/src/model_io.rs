//! Versioned plain-text serialization of [`NiqeModel`].
//!
//! ```text
//! NIQE-MODEL v1
//! patch_size 96
//! feature_dim 36
//! <36 mean values, one line>
//! <36 lines of 36 covariance values>
//! ```

use std::path::Path;

use crate::{MetricError, NiqeModel, Result, NIQE_FEATURE_DIM};

const MAGIC: &str = "NIQE-MODEL";

impl NiqeModel {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::new();
        out.push_str(&format!("{MAGIC} {}\n", self.version()));
        out.push_str(&format!("patch_size {}\n", self.patch_size()));
        out.push_str(&format!("feature_dim {}\n", self.feature_dim()));
        push_row(&mut out, self.mean());
        for row in self.covariance().chunks(NIQE_FEATURE_DIM) {
            push_row(&mut out, row);
        }
        std::fs::write(path, out).map_err(|source| MetricError::ModelIo {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| MetricError::ModelIo {
            path: path.to_path_buf(),
            source,
        })?;
        let err = |reason: String| MetricError::ModelParse {
            path: path.to_path_buf(),
            reason,
        };
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| err("empty file".into()))?;
        let version = match header.split_whitespace().collect::<Vec<_>>()[..] {
            [MAGIC, v] => v.to_string(),
            _ => return Err(err(format!("bad header line {header:?}"))),
        };
        if version != "v1" {
            return Err(err(format!("unsupported version {version:?}")));
        }
        let patch_size = parse_labeled(lines.next(), "patch_size").map_err(&err)?;
        let feature_dim = parse_labeled(lines.next(), "feature_dim").map_err(&err)?;
        if feature_dim != NIQE_FEATURE_DIM {
            return Err(err(format!(
                "feature_dim {feature_dim} unsupported, expected {NIQE_FEATURE_DIM}"
            )));
        }
        let mu = parse_row(lines.next(), NIQE_FEATURE_DIM).map_err(&err)?;
        let mut sigma = Vec::with_capacity(NIQE_FEATURE_DIM * NIQE_FEATURE_DIM);
        for i in 0..NIQE_FEATURE_DIM {
            let row = parse_row(lines.next(), NIQE_FEATURE_DIM)
                .map_err(|e| err(format!("covariance row {i}: {e}")))?;
            sigma.extend(row);
        }
        NiqeModel::new(patch_size, mu, sigma, version)
    }
}

fn push_row(out: &mut String, row: &[f64]) {
    for (i, v) in row.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&format!("{v}"));
    }
    out.push('\n');
}

fn parse_labeled(line: Option<&str>, label: &str) -> std::result::Result<usize, String> {
    let line = line.ok_or_else(|| format!("missing {label} line"))?;
    match line.split_whitespace().collect::<Vec<_>>()[..] {
        [l, v] if l == label => v.parse().map_err(|e| format!("bad {label}: {e}")),
        _ => Err(format!("expected \"{label} <value>\", got {line:?}")),
    }
}

fn parse_row(line: Option<&str>, n: usize) -> std::result::Result<Vec<f64>, String> {
    let line = line.ok_or("missing data line")?;
    let vals: std::result::Result<Vec<f64>, _> = line.split_whitespace().map(str::parse).collect();
    let vals = vals.map_err(|e| format!("bad value: {e}"))?;
    if vals.len() != n {
        return Err(format!("expected {n} values, got {}", vals.len()));
    }
    Ok(vals)
}
