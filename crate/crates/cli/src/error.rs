//! Failures of the command-line front end and their exit statuses.

use thiserror::Error;

/// Why a run did not produce its artifact.
#[derive(Debug, Error)]
pub enum CliError {
    /// Missing, malformed or inadmissible input (exit status 2).
    #[error("invalid input: {0}")]
    Input(String),

    /// The engine refused or failed numerically (exit status 3).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The output stream or configuration file could not be used (exit status 3).
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

impl From<besselgap::Error> for CliError {
    fn from(e: besselgap::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

/// Result alias of the front end.
pub type CliResult<T> = std::result::Result<T, CliError>;
