//! Error type shared by all engine modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QwError {
    #[error("invalid graph size: {0}")]
    InvalidSize(String),

    #[error("invalid sector specification: {0}")]
    InvalidSector(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("initial state not representable: {0}")]
    InvalidState(String),

    #[error("eigensolver failed: {0}")]
    NumericalFailure(String),

    #[error("oracle propagator limited to dimension {limit}, got {dim}")]
    OracleScope { dim: usize, limit: usize },

    #[error("site density undefined: state has zero particle-number expectation")]
    UndefinedDensity,

    #[error("invalid layer index {layer}: graph has layers {min}..={max}")]
    InvalidLayer { layer: usize, min: usize, max: usize },

    #[error("time grids differ: {0}")]
    GridMismatch(String),

    #[error("singular denominator: {0}")]
    SingularDenominator(String),

    #[error("effective model unsupported for these parameters: {0}")]
    UnsupportedRegime(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, QwError>;
