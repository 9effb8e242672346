//! CSV ingestion: RFC-4180-style files with a header row, UTF-8, "." decimal
//! separator. Every non-target column must parse as a finite real number;
//! anything else (including empty cells) is a hard error that names the
//! offending cell.

use std::path::Path;

use treepen_core::dataset::{Dataset, Target};

use crate::error::DataError;

/// Explicit task choice or detection from the target column: a target in
/// which every value parses as a number means regression, anything else
/// classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TaskChoice {
    #[default]
    Auto,
    Regression,
    Classification,
}

/// Loads a CSV file into a typed dataset.
///
/// Classification class indices follow first appearance order of the label
/// strings in file order, so byte-identical files always produce identical
/// datasets.
pub fn load_csv(
    path: impl AsRef<Path>,
    target_column: &str,
    task: TaskChoice,
) -> Result<Dataset, DataError> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| DataError::Io { path: path.display().to_string(), message: e.to_string() })?;

    let headers = reader
        .headers()
        .map_err(|e| DataError::Io { path: path.display().to_string(), message: e.to_string() })?
        .clone();
    let target_idx = headers
        .iter()
        .position(|h| h == target_column)
        .ok_or_else(|| DataError::MissingColumn { column: target_column.to_string() })?;

    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != target_idx)
        .map(|(_, h)| h.to_string())
        .collect();
    let n_features = feature_names.len();

    let mut features: Vec<f64> = Vec::new();
    let mut raw_targets: Vec<String> = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let row = row_idx + 1; // 1-based data row for diagnostics
        let record = record.map_err(|e| DataError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        if record.len() != headers.len() {
            return Err(DataError::Parse {
                row,
                column: String::from("<record>"),
                value: format!("{} fields, expected {}", record.len(), headers.len()),
            });
        }
        for (col_idx, cell) in record.iter().enumerate() {
            if col_idx == target_idx {
                raw_targets.push(cell.to_string());
                continue;
            }
            let value: f64 = cell.parse().map_err(|_| DataError::Parse {
                row,
                column: headers[col_idx].to_string(),
                value: cell.to_string(),
            })?;
            if !value.is_finite() {
                return Err(DataError::Parse {
                    row,
                    column: headers[col_idx].to_string(),
                    value: cell.to_string(),
                });
            }
            features.push(value);
        }
    }
    if raw_targets.is_empty() {
        return Err(DataError::EmptyDataset { path: path.display().to_string() });
    }

    let numeric: Option<Vec<f64>> = raw_targets
        .iter()
        .map(|s| s.parse::<f64>().ok().filter(|v| v.is_finite()))
        .collect();
    let as_regression = match task {
        TaskChoice::Regression => true,
        TaskChoice::Classification => false,
        TaskChoice::Auto => numeric.is_some(),
    };

    let target = if as_regression {
        let ys = numeric.ok_or_else(|| {
            // name the first non-numeric target cell
            let (row, value) = raw_targets
                .iter()
                .enumerate()
                .find(|(_, s)| !s.parse::<f64>().map(|v| v.is_finite()).unwrap_or(false))
                .map(|(i, s)| (i + 1, s.clone()))
                .unwrap_or((1, String::new()));
            DataError::Parse { row, column: target_column.to_string(), value }
        })?;
        Target::Regression(ys)
    } else {
        let mut labels: Vec<String> = Vec::new();
        let mut classes = Vec::with_capacity(raw_targets.len());
        for t in &raw_targets {
            let idx = match labels.iter().position(|l| l == t) {
                Some(i) => i,
                None => {
                    labels.push(t.clone());
                    labels.len() - 1
                }
            };
            classes.push(idx);
        }
        if labels.len() < 2 {
            return Err(DataError::SingleClass { label: labels.pop().unwrap_or_default() });
        }
        let n_classes = labels.len();
        return Dataset::from_parts(
            feature_names,
            features,
            Target::Classification { classes, n_classes },
            labels,
        )
        .map_err(DataError::from);
    };

    let _ = n_features;
    Dataset::from_parts(feature_names, features, target, vec![]).map_err(DataError::from)
}

/// Loads feature rows for prediction: the file must contain every named
/// feature column (extra columns, including a target, are ignored). Returns
/// rows in file order, columns in `feature_names` order.
pub fn load_matrix(
    path: impl AsRef<Path>,
    feature_names: &[String],
) -> Result<Vec<Vec<f64>>, DataError> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| DataError::Io { path: path.display().to_string(), message: e.to_string() })?;
    let headers = reader
        .headers()
        .map_err(|e| DataError::Io { path: path.display().to_string(), message: e.to_string() })?
        .clone();
    let mut column_of: Vec<usize> = Vec::with_capacity(feature_names.len());
    for name in feature_names {
        let idx = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DataError::MissingFeature { column: name.clone() })?;
        column_of.push(idx);
    }
    let mut rows = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let row = row_idx + 1;
        let record = record.map_err(|e| DataError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let mut values = Vec::with_capacity(column_of.len());
        for (&col, name) in column_of.iter().zip(feature_names) {
            let cell = record.get(col).unwrap_or("");
            let value: f64 = cell.parse().map_err(|_| DataError::Parse {
                row,
                column: name.clone(),
                value: cell.to_string(),
            })?;
            if !value.is_finite() {
                return Err(DataError::Parse { row, column: name.clone(), value: cell.to_string() });
            }
            values.push(value);
        }
        rows.push(values);
    }
    Ok(rows)
}
