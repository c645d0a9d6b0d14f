use std::process::ExitCode;

use thiserror::Error;
use tunnelopt::Error as LibError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(LibError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Numerical(_) => ExitCode::from(3),
            CliError::Io(_) => ExitCode::FAILURE,
        }
    }
}

/// Library errors that can only come from bad configuration values are
/// reported as config errors; everything else is a numerical failure.
impl From<LibError> for CliError {
    fn from(e: LibError) -> Self {
        match e {
            LibError::InvalidInput(_)
            | LibError::DimensionMismatch { .. }
            | LibError::NotHermitian { .. }
            | LibError::NotPsd { .. }
            | LibError::NonPositiveRate { .. }
            | LibError::NotMonotone { .. }
            | LibError::BadEndpoints => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e),
        }
    }
}
