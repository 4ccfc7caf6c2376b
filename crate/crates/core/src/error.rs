use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by scene generation, training, and I/O.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("infeasible geometry: {0}")]
    Generation(String),

    #[error("rasterization error: {0}")]
    Rasterization(String),

    #[error("degenerate label: trajectory mask is empty")]
    DegenerateLabel,

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    #[error("non-finite loss at epoch {epoch}, sample {sample}; diagnostics in {dump:?}")]
    NonFiniteLoss {
        epoch: usize,
        sample: usize,
        dump: PathBuf,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}
