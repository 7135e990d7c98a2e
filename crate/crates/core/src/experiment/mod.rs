//! Config-driven experiment runs that write plot-ready CSV tables and a manifest.
//!
//! A run reads an [`ExperimentConfig`], executes one task and writes its tables, a long-format
//! `results.csv` and `manifest.json` into the output directory. [`summarize`] merges the
//! `results.csv` files of several runs over the same graph.

mod config;
mod io;
mod manifest;
mod tasks;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{
    ApproxParams, DesignParams, DetectParams, EpidemicsParams, ExperimentConfig, GftParams, GraphConfig, GraphFormat,
    GraphGenerator, LocalizeParams, RecoverParams, RecoveryStrategy, Representation, SignalConfig, SignalRecipe,
    TaskConfig, TaskKind, SCHEMA_VERSION,
};
pub use io::{format_value, load_graph, load_signals, write_signals, Table};
pub use manifest::{summarize, Manifest, OutputFile, RESULTS_HEADER};
pub use tasks::{run, RunReport};

/// Failures of a run, grouped by the exit code they map to.
#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: expected {expected} rows, found {found}")]
    ShapeMismatch { path: PathBuf, expected: usize, found: usize },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error(transparent)]
    Numeric(#[from] crate::Error),
    #[error("incompatible runs: {0}")]
    IncompatibleRuns(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Io { .. } | RunError::ShapeMismatch { .. } | RunError::Parse { .. } => 3,
            RunError::Numeric(_) => 4,
            RunError::IncompatibleRuns(_) => 5,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        RunError::Io { path: path.into(), source }
    }
}

pub type RunResult<T> = std::result::Result<T, RunError>;
