use std::path::{Path, PathBuf};

use serde::Serialize;

/// Errors the command line maps to exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("missing {}: run `topocontro {command}` first", path.display())]
    MissingArtifact { path: PathBuf, command: &'static str },
    #[error(transparent)]
    Other(#[from] anyhow::Error),
}

impl CliError {
    pub fn missing(path: impl AsRef<Path>, command: &'static str) -> Self {
        CliError::MissingArtifact {
            path: path.as_ref().to_path_buf(),
            command,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::MissingArtifact { .. } => 2,
            CliError::Other(_) => 1,
        }
    }

    pub fn summary(&self) -> ErrorSummary {
        let (kind, run_first) = match self {
            CliError::MissingArtifact { command, .. } => ("missing_artifact", Some(*command)),
            CliError::Other(_) => ("error", None),
        };
        ErrorSummary {
            status: "error",
            exit_code: self.exit_code(),
            kind,
            message: format!("{:#}", self),
            run_first,
        }
    }
}

/// Machine-readable error line printed on failure.
#[derive(Debug, Serialize)]
pub struct ErrorSummary {
    pub status: &'static str,
    pub exit_code: i32,
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run_first: Option<&'static str>,
}

pub type CliResult<T> = Result<T, CliError>;

/// Fail with the exit-2 error unless `path` exists.
pub fn require(path: &Path, command: &'static str) -> CliResult<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(CliError::missing(path, command))
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.into())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Other(e.into())
    }
}
