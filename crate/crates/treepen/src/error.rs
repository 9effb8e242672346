//! Error types for the IO and CLI surface.

use thiserror::Error;
use treepen_core::dataset::DatasetError;

/// Data-level failures: ingestion, model files, prediction inputs.
/// These map to exit code 2 at the CLI boundary.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("column '{column}' not found in header")]
    MissingColumn { column: String },
    #[error("cannot parse cell at row {row}, column '{column}': '{value}'")]
    Parse { row: usize, column: String, value: String },
    #[error("{path}: no data rows")]
    EmptyDataset { path: String },
    #[error("classification target has a single class '{label}'")]
    SingleClass { label: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid dataset: {0}")]
    Dataset(#[from] DatasetError),
    #[error("model file: {0}")]
    Model(String),
    #[error("prediction input is missing feature column '{column}'")]
    MissingFeature { column: String },
    #[error("class of interest '{label}' not among the target labels")]
    UnknownClass { label: String },
}
