//! Command-line front end for the semitunnel library.

pub mod commands;
pub mod config;
pub mod output;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("strict mode: {0}")]
    Strict(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// 2 for bad input or unwritable output, 3 for numerical failures, 4 for promoted warnings.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Strict(_) => 4,
        }
    }
}
