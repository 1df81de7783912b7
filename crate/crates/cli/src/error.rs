use std::path::{Path, PathBuf};

use mfi_core::MfiError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] MfiError),

    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_owned(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 4,
            CliError::Core(e) => match e {
                MfiError::InvalidParams(_)
                | MfiError::InvalidGrid(_)
                | MfiError::Domain(_)
                | MfiError::Config(_)
                | MfiError::DomainCoverage(_) => 2,
                MfiError::Convergence { .. } => 5,
                MfiError::Normalization { .. }
                | MfiError::InvalidDensity { .. }
                | MfiError::Range(_)
                | MfiError::Contract(_) => 3,
            },
        }
    }
}
