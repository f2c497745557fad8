use thiserror::Error;

/// Errors raised by the numerical kernel, basis construction and the experiment drivers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 2, got {0}")]
    InvalidDimension(usize),

    #[error("invalid subsystem {0}, expected 1 or 2")]
    InvalidSubsystem(u8),

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("phase matrix entry ({s},{t}) has modulus {modulus}, expected 1")]
    NotUnimodular { s: usize, t: usize, modulus: f64 },

    #[error("coefficients are not a probability vector: {0}")]
    NotProbability(String),

    #[error("state lives in basis {found}, expected {expected}")]
    BasisMismatch { expected: String, found: String },

    #[error("operation requires the standard Bell basis")]
    NonStandardBasis,

    #[error("correlation undefined: zero variance")]
    ZeroVariance,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("experiment too large: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
