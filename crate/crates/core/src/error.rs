use thiserror::Error;

/// Errors produced by grid construction, operator evaluation and the verification suites.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sampling produced non-finite value {value} at node {index:?} (point {point:?})")]
    Sampling {
        index: Vec<usize>,
        point: Vec<f64>,
        value: f64,
    },

    /// The grid is too coarse for the requested sequence parameter.
    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
