use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid LFSR spec: {0}")]
    InvalidLfsr(String),

    #[error("LFSR orbit exceeded limit of {limit} steps")]
    LimitExceeded { limit: u64 },

    #[error("{func} is undefined for {value}")]
    Domain { func: &'static str, value: f64 },

    #[error("cannot scale a zero-norm perturbation")]
    ZeroNorm,

    #[error("scale exponent {0} does not fit the 8-bit LUT layout")]
    ExponentRange(i32),

    #[error("LUT address collision: phases {first} and {second} both map to address {address}")]
    AddressCollision {
        address: u32,
        first: u64,
        second: u64,
    },

    #[error("LUT address {0} is not populated")]
    InvalidAddress(u32),

    #[error("scale LUT was built for a different array or dimension")]
    LutMismatch,

    #[error("pool size {0} is not a power of two minus one")]
    InvalidSize(usize),

    #[error("perturbation dimension {got} does not match provider dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("snapshot does not belong to this provider configuration")]
    CorruptSnapshot,

    #[error("non-finite loss at step {step}")]
    NonFiniteLoss { step: u64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("ingest error at row {row}, column {column}: {message}")]
    Ingest {
        row: usize,
        column: String,
        message: String,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("configs differ in the `{0}` block")]
    MismatchedConfigs(&'static str),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True when the reader of an output stream went away, e.g. `| head`.
    pub fn is_broken_pipe(&self) -> bool {
        let io = match self {
            Error::Io { source, .. } => Some(source),
            Error::Csv(e) => match e.kind() {
                csv::ErrorKind::Io(e) => Some(e),
                _ => None,
            },
            _ => None,
        };
        io.is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe)
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
