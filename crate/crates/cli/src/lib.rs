//! `memrw` command-line front end: single-episode runs, manifest sweeps and
//! report aggregation.
//!
//! Exit codes: 0 on success, 2 for usage, config and manifest errors, 3 for
//! failures while running.

pub mod commands;
pub mod manifest;
pub mod plot;
pub mod report;

use memrw_core::eval::EvalError;
use memrw_core::ConfigError;
use thiserror::Error;

pub use commands::{execute, Cli};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Manifest(#[from] manifest::ManifestError),
    #[error(transparent)]
    Report(#[from] report::ReportError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{0}")]
    Runtime(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_)
            | CliError::Config(_)
            | CliError::Manifest(_)
            | CliError::Report(_) => 2,
            CliError::Eval(e) => match e {
                EvalError::Rollout { .. } | EvalError::Pool(_) => 3,
                _ => 2,
            },
            CliError::Runtime(_) | CliError::Io { .. } => 3,
        }
    }
}
