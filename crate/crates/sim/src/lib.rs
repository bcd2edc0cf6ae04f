//! Input files, output tables and the sweep driver behind the `simulate` tool.

pub mod crossings;
pub mod files;
pub mod format;
pub mod report;
pub mod run;
pub mod tables;

use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    /// Bad command line, unreadable or inconsistent inputs.
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] exciton_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Write(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl SimError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn is_config(&self) -> bool {
        matches!(self, SimError::Config(_))
    }
}
