use thiserror::Error;

/// Errors raised by the combinatorial and numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("argument count mismatch: expected {expected}, got {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("{what} out of range: {value} (allowed {min}..={max})")]
    OutOfRange {
        what: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("word of length {len} exceeds the family's maximal order {max}")]
    OrderExceeded { len: usize, max: usize },

    #[error("family has no map for word {0:?}")]
    MissingWord(Vec<usize>),

    #[error("family kind mismatch: expected {expected}, got {found}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("combinatorial budget exceeded: more than {0} products")]
    BudgetExceeded(usize),

    #[error("power series has nonzero constant term at index {0}")]
    NonzeroConstantTerm(usize),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("branch tracking failed near w = {re} + {im}i: {reason}")]
    BranchTracking { re: f64, im: f64, reason: String },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
