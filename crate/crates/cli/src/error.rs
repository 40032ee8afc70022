use std::path::Path;

use sped::SpedError;
use thiserror::Error;

/// Failure of a command, carrying its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    MissingFile(String),
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] SpedError),
}

pub type CliResult<T> = Result<T, CliError>;

pub const EXIT_DATA: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_PRECONDITION: i32 = 65;
pub const EXIT_MISSING: i32 = 66;
pub const EXIT_WRITE: i32 = 74;

fn core_code(e: &SpedError) -> i32 {
    match e {
        SpedError::Domain(_) => EXIT_USAGE,
        SpedError::Precondition(_) => EXIT_PRECONDITION,
        SpedError::Data(_) => EXIT_DATA,
        SpedError::Replicate { source, .. } => core_code(source),
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::MissingFile(_) => EXIT_MISSING,
            CliError::Write { .. } => EXIT_WRITE,
            CliError::Core(e) => core_code(e),
        }
    }

    pub fn write(path: &Path, source: impl Into<std::io::Error>) -> Self {
        CliError::Write {
            path: path.display().to_string(),
            source: source.into(),
        }
    }
}
