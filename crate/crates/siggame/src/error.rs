use std::path::PathBuf;

use siggame_core::{Error as CoreError, ParamError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Solver(#[from] CoreError),
    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl From<ParamError> for CliError {
    fn from(e: ParamError) -> Self {
        CliError::Solver(CoreError::InvalidParams(e))
    }
}

impl CliError {
    /// 2 for bad input, 3 for a solver precondition, 1 for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(CoreError::InvalidParams(_))
            | CliError::Solver(CoreError::LengthMismatch { .. })
            | CliError::Solver(CoreError::InvalidArgument(_)) => 2,
            CliError::Solver(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}

/// Exit code when a `--verify` check fails.
pub const VERIFY_FAILED: u8 = 4;
