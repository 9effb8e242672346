//! IO, file formats and the command line for penalized decision trees.
//!
//! The algorithms live in `treepen-core`; this crate adds CSV ingestion,
//! the JSON model format, DOT/text rendering, report tables and the
//! `treepen` binary.

pub mod cli;
pub mod csv;
pub mod error;
pub mod model;
pub mod render;
pub mod report;

pub use csv::{load_csv, load_matrix, TaskChoice};
pub use error::DataError;
pub use model::{deserialize, serialize, TrainingSummary, FORMAT_VERSION};
pub use render::{render_dot, render_text};
