//! File formats and command implementations for the `vibronic` tool.
//!
//! - [`cli`]: the `vibronic` command line.
//! - [`molecule_file`]: the JSON molecule description.
//! - [`spectrum_csv`]: `energy_cm1,intensity` CSV with `#` provenance lines.
//! - [`svg`]: a single-curve line plot.

pub mod cli;
pub mod molecule_file;
pub mod spectrum_csv;
pub mod svg;

use std::path::PathBuf;

pub use vibronic_core as core;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("molecule file: {0}")]
    Json(#[from] serde_json::Error),

    #[error("mode {index}: {message}")]
    Mode { index: usize, message: String },

    #[error("line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error(transparent)]
    Core(#[from] vibronic_core::Error),
}

impl IoError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = IoError> = std::result::Result<T, E>;
