use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Rejected before any computation started.
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] symbreak_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// A core precondition failure seen while validating.
    pub fn invalid(e: symbreak_core::Error) -> Self {
        Self::Config(e.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical(_) => 3,
            Self::Io { .. } => 1,
        }
    }
}

pub fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Config(msg()))
    }
}
