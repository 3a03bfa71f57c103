use thiserror::Error;

/// Errors raised by problem construction, linear algebra and solver setup.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("index list must be strictly increasing")]
    UnsortedIndices,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid bounds at component {index}: lower {lower} must be below upper {upper}")]
    InvalidBounds { index: usize, lower: f64, upper: f64 },

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("matrix is numerically singular (pivot {pivot:e} at column {column})")]
    Singular { column: usize, pivot: f64 },

    #[error("zero diagonal entry in row {0}")]
    ZeroDiagonal(usize),

    #[error("matrix too large for dense factorization: n = {n} exceeds cap {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("no complementary solution found")]
    NoSolution,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
