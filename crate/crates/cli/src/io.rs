//! Feature, label and hierarchy file ingestion.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use gel_core::kernel::LabelHierarchy;
use gel_core::linalg::Mat;
use gel_core::moments::FeatureSet;

use crate::npy::read_npy;
use crate::CliError;

/// Loads a feature matrix, dispatching on extension: `.npy` for binary,
/// anything else is parsed as CSV (optional header row, one sample per
/// line). An optional labels file supplies one label per line.
pub fn load_features(path: &Path, labels_path: Option<&Path>) -> Result<FeatureSet, CliError> {
    let matrix = if path.extension().and_then(|e| e.to_str()) == Some("npy") {
        read_npy(path)?
    } else {
        read_csv(path)?
    };
    let labels = labels_path.map(|p| read_labels(p, matrix.rows())).transpose()?;
    FeatureSet::new(matrix, labels).map_err(|e| CliError::Invalid {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

/// CSV of floats; a non-numeric first row is treated as a header and
/// skipped.
pub fn read_csv(path: &Path) -> Result<Mat, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let bad = |msg: String| CliError::Invalid { path: path.display().to_string(), msg };

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parsed: Result<Vec<f64>, _> =
            line.split(',').map(|f| f.trim().parse::<f64>()).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(e) => {
                if lineno == 0 && rows.is_empty() {
                    continue; // header row
                }
                return Err(bad(format!("line {}: {e}", lineno + 1)));
            }
        }
    }
    if rows.is_empty() {
        return Err(bad("no data rows".into()));
    }
    let width = rows[0].len();
    if let Some(i) = rows.iter().position(|r| r.len() != width) {
        return Err(bad(format!(
            "ragged rows: line width {} differs from {}",
            rows[i].len(),
            width
        )));
    }
    Mat::from_rows(&rows).map_err(|e| bad(e.to_string()))
}

/// One label per line; must match the sample count exactly.
pub fn read_labels(path: &Path, expected: usize) -> Result<Vec<String>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let labels: Vec<String> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect();
    if labels.len() != expected {
        return Err(CliError::Invalid {
            path: path.display().to_string(),
            msg: format!("{} labels for {} samples", labels.len(), expected),
        });
    }
    Ok(labels)
}

/// JSON object mapping label id to its root-first node path.
pub fn read_hierarchy(path: &Path) -> Result<LabelHierarchy, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let paths: BTreeMap<String, Vec<String>> =
        serde_json::from_str(&text).map_err(|e| CliError::Invalid {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
    LabelHierarchy::new(paths).map_err(|e| CliError::Invalid {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}
