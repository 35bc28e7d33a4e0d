use thiserror::Error;

pub type Result<T, E = BraceError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BraceError {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is singular modulo {0}")]
    Singular(u64),

    #[error("quadratic form has odd diagonal entry in characteristic 2 (row {0})")]
    OddDiagonal(usize),

    #[error("quadratic form is degenerate")]
    DegenerateForm,

    #[error("matrix does not preserve the quadratic form")]
    NotOrthogonal,

    #[error("element order {order} is not a power of {p} dividing {bound}")]
    BadOrder { order: u64, p: u64, bound: u64 },

    #[error("order {order} exceeds the exhaustive cap {cap}")]
    CapExceeded { order: String, cap: usize },

    #[error("element does not conform to the additive shape: {0}")]
    ShapeMismatch(String),

    #[error("invalid lambda table: {0}")]
    InvalidTable(String),

    #[error("validation failed: {0}")]
    ValidationFailed(String),

    #[error("precondition not met: {0}")]
    Precondition(String),
}
