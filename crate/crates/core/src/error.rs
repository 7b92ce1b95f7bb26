use thiserror::Error;

/// Errors produced by the library.
///
/// The CLI maps these onto exit codes: invalid input and numeric
/// degeneracy exit 2, unsupported triples exit 3, insufficient data
/// exits 4.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed arguments, out-of-domain points, unparseable files.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The requested operation needs a property the triple lacks
    /// (typically square integrability of the metric).
    #[error("unsupported triple: {0}")]
    UnsupportedTriple(String),

    /// Too few samples or replications for the requested statistic.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The computation collapsed (all-zero medians, constant samples).
    #[error("numeric degeneracy: {0}")]
    NumericDegeneracy(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
