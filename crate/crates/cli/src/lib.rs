//! Configuration, orchestration and report writing for the `stableforce`
//! command-line tool.

pub mod config;
pub mod grid;
pub mod report;
pub mod run;

use stableforce::Error as CoreError;

/// Process exit codes.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(
                CoreError::NoRoot(_) | CoreError::NonConvergence(_) | CoreError::Sampling(_),
            ) => EXIT_FAIL,
            _ => EXIT_USAGE,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Core(_) => "numerics",
            CliError::Io(_) => "io",
            CliError::Csv(_) => "csv",
        }
    }
}
