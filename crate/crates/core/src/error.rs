use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("geometry: {0}")]
    Geometry(String),

    #[error("agent left the arena at step {step}: ({x:.6}, {y:.6})")]
    LeftArena { step: usize, x: f64, y: f64 },

    #[error("{path}: unsupported trace version {found:?}")]
    TraceVersion { path: PathBuf, found: String },

    #[error("{path}: trace truncated: {detail}")]
    TraceTruncated { path: PathBuf, detail: String },

    #[error("{path}: config digest mismatch (file {found}, expected {expected})")]
    DigestMismatch { path: PathBuf, found: String, expected: String },

    #[error("{path}: sample count mismatch (declared {declared}, found {found})")]
    SampleCount { path: PathBuf, declared: usize, found: usize },

    #[error("{path}:{line}: malformed record: {detail}")]
    Malformed { path: PathBuf, line: usize, detail: String },

    #[error("I/O failure on {context}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { context: context.into(), source }
    }

    /// True for errors caused by bad user input rather than a runtime failure.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::DigestMismatch { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
