use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("token {token} at position {position} is outside alphabet of size {alphabet_size}")]
    TokenOutOfRange {
        token: u32,
        position: usize,
        alphabet_size: u32,
    },
    #[error("alphabet size must be at least 1")]
    EmptyAlphabet,
    #[error("alphabet size mismatch: {left} vs {right}")]
    AlphabetMismatch { left: u32, right: u32 },
    #[error("sequence too large for the rotation-sort oracle ({len} > {max})")]
    OracleInputTooLarge { len: usize, max: usize },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("distribution does not sum to 1 (sum = {sum})")]
    NotNormalized { sum: f64 },
    #[error("malformed input in {path}: {reason}")]
    Malformed { path: PathBuf, reason: String },
    #[error("missing label for {0}")]
    MissingLabel(String),
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
