//! CLI error type: wraps the core error and adds argument/plumbing variants,
//! each mapped to a stable machine-readable kind for the error JSON.

use anderson_core::CoreError;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(
        "config {path}: experiment {found:?} does not belong to subcommand \
         `{subcommand}`; expected {expected:?}"
    )]
    ExperimentMismatch { path: PathBuf, found: String, subcommand: String, expected: String },

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Stable kind tag for the error JSON emitted on stderr.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::ExperimentMismatch { .. } => "config",
            CliError::Core(CoreError::Config { .. }) => "config",
            CliError::Core(CoreError::InvalidArgument(_)) => "config",
            CliError::Core(CoreError::BudgetExceeded(_)) => "budget",
            CliError::Core(_) => "run",
            CliError::Io { .. } => "io",
        }
    }

    /// 2 for refusals before any computation (bad usage, bad config, budget),
    /// 1 for failures during a run.
    pub fn exit_code(&self) -> u8 {
        match self.kind() {
            "usage" | "config" | "budget" => 2,
            _ => 1,
        }
    }
}

/// Single-line error JSON on stderr: `{"error":{"kind":...,"message":...}}`.
pub fn emit_error_json(kind: &str, message: &str) {
    let body = serde_json::json!({ "error": { "kind": kind, "message": message } });
    eprintln!("{body}");
}
