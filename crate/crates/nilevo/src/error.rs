use thiserror::Error;

use crate::numeric::FieldTag;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("backend mismatch: cannot combine {left} with {right}")]
    BackendMismatch { left: FieldTag, right: FieldTag },

    #[error("operation requires a real or complex backend, got {0}")]
    UnsupportedBackend(FieldTag),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degenerate norm: gamma is zero, so the gamma-norm vanishes identically")]
    DegenerateNorm,

    #[error("algebra is outside the classified class: {0}")]
    NotClassified(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("matrix is singular")]
    Singular,

    #[error("branch error: {0}")]
    Branch(String),

    #[error("exponential series did not reach tolerance within {0} terms")]
    SeriesCap(usize),

    #[error("parse error: {0}")]
    Parse(String),
}
