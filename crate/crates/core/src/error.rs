use thiserror::Error;

/// Errors raised across the reconciliation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field order {0}: expected a power of two in [2, 256]")]
    InvalidOrder(usize),
    #[error("division by zero in GF({0})")]
    DivisionByZero(usize),
    #[error("element {element} out of range for GF({q})")]
    ElementOutOfRange { element: usize, q: usize },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("degenerate code rate: n={n}, punctured={punctured}, shortened={shortened}")]
    DegenerateRate {
        n: usize,
        punctured: usize,
        shortened: usize,
    },
    #[error("invalid degree distribution: {0}")]
    Distribution(String),
    #[error("code construction failed: {0}")]
    Construction(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("protocol contract violated: {0}")]
    Protocol(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
