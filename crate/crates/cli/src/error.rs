use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// A checked invariant or proof verdict failed.
    #[error("{0}")]
    Breach(String),

    /// Bad flags, config or input files.
    #[error("{0}")]
    Usage(String),

    /// Something that should not happen on valid input.
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Breach(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 3,
        })
    }
}

impl From<saari_core::CoreError> for CliError {
    fn from(e: saari_core::CoreError) -> Self {
        CliError::Internal(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(format!("i/o error: {e}"))
    }
}
