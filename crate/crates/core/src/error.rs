use thiserror::Error;

/// Errors raised by the needlet toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported cubature scheme `{0}` (expected `paper_matching` or `exact`)")]
    UnsupportedScheme(String),

    #[error("degree {requested} exceeds what the sampling resolves (max {resolvable})")]
    ResolutionTooLow { requested: usize, resolvable: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("missing prior for band {0}")]
    MissingPrior(usize),

    #[error("malformed data: {0}")]
    Format(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command line tool for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(_) => 4,
            Error::InvalidArgument(_) | Error::UnsupportedScheme(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
