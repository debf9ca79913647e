use std::io;
use std::path::PathBuf;

use extremal_core::Error as CoreError;

/// Failures of a run, each with its own process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("inadmissible mixing target: {0}")]
    Inadmissible(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("matrix literal is not Hermitian: {0}")]
    NotHermitian(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Config(_) => 2,
            CliError::Inadmissible(_) => 3,
            CliError::Solver(_) => 4,
            CliError::Verification(_) => 5,
            CliError::NotHermitian(_) => 6,
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config(message.into())
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let message = e.to_string();
        match e {
            CoreError::NotHermitian { .. } => CliError::NotHermitian(message),
            CoreError::InadmissibleTarget { .. } => CliError::Inadmissible(message),
            CoreError::NonFiniteParameter(_)
            | CoreError::InvalidWeights
            | CoreError::UnknownParameter(_)
            | CoreError::Dimension { .. }
            | CoreError::IndexOutOfRange { .. }
            | CoreError::NotTraceOne { .. }
            | CoreError::DegenerateParameters(_) => CliError::Config(message),
            _ => CliError::Solver(message),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
