//! Command-line harness around the `hfvs` solver: configured runs,
//! convergence tables, scheme comparisons with timing, the leading-term
//! study and fine-grid references. Everything here writes plot-ready CSV and
//! JSON; nothing plots.

pub mod cli;
pub mod commands;
pub mod config;
pub mod fields;
pub mod report;

use std::path::PathBuf;

pub use config::{ConfigError, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Solver(#[from] hfvs::HfvsError),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

pub(crate) fn io_error(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> HarnessError {
    let path = path.into();
    move |source| HarnessError::Io { path, source }
}
