//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SbmError {
    /// Model or numerics parameters violate an invariant.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A closed form was requested outside the regime where it holds.
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    /// Fock truncation too small for the requested construction.
    #[error("truncation inadequate: {0}")]
    TruncationInadequate(String),

    /// Dimension mismatch between operators and states.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    /// Expectation value requested for a non-Hermitian operator.
    #[error("operator is not flagged Hermitian")]
    NotHermitian,

    /// Special-function argument outside the supported range.
    #[error("domain exceeded: {0}")]
    DomainExceeded(String),

    /// Degenerate input to an estimator or no oscillation to measure.
    #[error("no oscillation: {0}")]
    NoOscillation(String),

    /// Measured means incompatible with the resonance model.
    #[error("inconsistent measurements: {0}")]
    InconsistentMeasurement(String),

    /// A propagation or quadrature failed numerically.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Requested averaging window exceeds the sampled series.
    #[error("range exceeded: {0}")]
    RangeExceeded(String),

    /// An experiment could not produce its result (e.g. missing peaks).
    #[error("experiment failed: {0}")]
    ExperimentFailed(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SbmError>;
