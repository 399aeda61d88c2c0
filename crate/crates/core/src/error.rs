//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JacobiError {
    #[error("invalid interval: lo {lo} exceeds hi {hi}")]
    InvalidInterval { lo: i64, hi: i64 },

    #[error("off-diagonal entry a({site}) = {value} must be positive")]
    NonPositiveOffDiagonal { site: i64, value: f64 },

    #[error("sequence of length {got} does not match expected length {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("interval [{sub_lo}, {sub_hi}] is not contained in [{lo}, {hi}]")]
    NotContained {
        sub_lo: i64,
        sub_hi: i64,
        lo: i64,
        hi: i64,
    },

    #[error("site {site} outside range [{lo}, {hi}]")]
    RangeError { site: i64, lo: i64, hi: i64 },

    #[error("eigensolver did not converge for index {index} within {max_sweeps} sweeps")]
    ConvergenceFailure { index: usize, max_sweeps: usize },

    #[error("the zero vector generates no spectral measure")]
    ZeroVector,

    #[error("atom near {location} has mass {mass:e} at or below {tol:e}; density undefined there")]
    NullAtom { location: f64, mass: f64, tol: f64 },

    #[error("weight {weight} at location {location} is negative")]
    NegativeWeight { location: f64, weight: f64 },

    #[error("invalid distribution: {0}")]
    InvalidSpec(String),

    #[error("potential model does not cover site {site}")]
    CoverageError { site: i64 },

    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),

    #[error("matrix file: {0}")]
    BadMatrixFile(String),
}

pub type Result<T> = std::result::Result<T, JacobiError>;
