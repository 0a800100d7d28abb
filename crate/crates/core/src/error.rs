use thiserror::Error;

/// Errors raised by the decoupling library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid tensor structure: {0}")]
    InvalidDims(String),

    #[error("dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("operator is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),

    #[error("operator is not unitary (residual {0:.3e})")]
    NotUnitary(f64),

    #[error("not a density operator: {0}")]
    NotDensity(String),

    #[error("group is not closed: {0}")]
    NotClosed(String),

    #[error("invalid Pauli word {0:?}")]
    InvalidPauliWord(String),

    #[error("observable is outside the commutant: {0}")]
    NotInCommutant(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
