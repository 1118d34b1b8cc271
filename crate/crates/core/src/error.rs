use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("insufficient data: need at least {needed} rows, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// All points coincide; there is no variance to estimate a scale from.
    #[error("degenerate data: total variance is zero")]
    DegenerateData,

    /// Rows of the affinity matrix that sum to zero.
    #[error("isolated points with zero affinity: {0:?}")]
    IsolatedPoints(Vec<usize>),

    #[error("degenerate spectral embedding: row {0} is numerically zero")]
    DegenerateEmbedding(usize),

    #[error("eigensolver failed to converge")]
    NoConvergence,

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::InvalidData(_) => "invalid_data",
            Error::InsufficientData { .. } => "insufficient_data",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::DegenerateData => "degenerate_data",
            Error::IsolatedPoints(_) => "isolated_points",
            Error::DegenerateEmbedding(_) => "degenerate_embedding",
            Error::NoConvergence => "no_convergence",
            Error::Parse { .. } => "parse",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }

    /// Process exit code: 2 config, 3 data, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidParameter(_) => 2,
            Error::Dimension(_)
            | Error::InvalidData(_)
            | Error::InsufficientData { .. }
            | Error::Parse { .. }
            | Error::Io(_) => 3,
            Error::DegenerateData
            | Error::IsolatedPoints(_)
            | Error::DegenerateEmbedding(_)
            | Error::NoConvergence => 4,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
