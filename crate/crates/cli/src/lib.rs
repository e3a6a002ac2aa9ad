//! Command-line driver: configuration, presets, subcommands and CSV output.

pub mod commands;
pub mod config;
pub mod output;
pub mod presets;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Verification(_) => 4,
            CliError::Io(_) => 1,
        }
    }

    /// Parameter errors are config errors; everything else from the
    /// library is a numeric failure.
    pub fn from_param(e: fishbone::Error) -> Self {
        match e {
            fishbone::Error::InvalidParameter { .. } | fishbone::Error::EmptyGrid(_) => CliError::Config(e.to_string()),
            other => CliError::Numeric(other.to_string()),
        }
    }

    pub fn numeric(e: fishbone::Error) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
