//! Config-driven experiments over random iterated function systems.
//!
//! A run loads an [`ExperimentConfig`](config::ExperimentConfig), executes its
//! tasks in order and writes one CSV or PPM file per task.

pub mod config;
pub mod corpus;
pub mod format;
pub mod render;
pub mod run;

use thiserror::Error;

pub use config::{load_config, parse_config, ExperimentConfig};
pub use run::{run, RunOptions};

/// Failures while reading a config. Each stage has its own variant.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at {}: {message}", if field.is_empty() { "top level" } else { field })]
    Schema { field: String, message: String },
    #[error("semantic error at {field}: {source}")]
    Semantic {
        field: String,
        #[source]
        source: rifslab_core::Error,
    },
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("task {index} ({task}): {source}")]
    Task {
        index: usize,
        task: &'static str,
        #[source]
        source: rifslab_core::Error,
    },
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    /// Process exit status: 1 validation, 2 resource limit, 3 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(ConfigError::Io { .. }) | RunError::Io { .. } => 3,
            RunError::Config(_) => 1,
            RunError::Task {
                source: rifslab_core::Error::Resource { .. },
                ..
            } => 2,
            RunError::Task { .. } => 1,
        }
    }
}

pub const BUDGET_ENV: &str = "RIFSLAB_BUDGET";

/// `--budget` wins over the environment, which wins over the library default.
pub fn resolve_budget(flag: Option<u64>, env: Option<&str>) -> Result<u64, String> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match env {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| format!("{BUDGET_ENV}={v:?} is not a non-negative integer")),
        None => Ok(rifslab_core::model::DEFAULT_BUDGET),
    }
}
