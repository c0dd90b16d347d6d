use std::path::PathBuf;

use frechet_core::FrechetError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    /// Results were written but some solver runs did not converge.
    #[error("{0}")]
    Partial(String),
    #[error(transparent)]
    Core(#[from] FrechetError),
    #[error("cannot {action} {path}: {source}")]
    Io {
        action: &'static str,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Partial(_) => "non_convergence",
            CliError::Io { .. } => "io",
            CliError::Core(e) => match e.root() {
                FrechetError::NonConvergence { .. } => "non_convergence",
                FrechetError::Config(_) => "config",
                FrechetError::Argument(_) => "argument",
                FrechetError::Unsupported(_) => "unsupported",
                FrechetError::AtSample { .. } => "config",
            },
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "non_convergence" => 3,
            "io" => 4,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
