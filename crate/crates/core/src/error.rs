//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failure modes of the library operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Two objects disagree on the ambient dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Input data that cannot describe the requested object.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Generator set does not span the ambient space.
    #[error("degenerate generator set: rank {rank} < {dim}")]
    Degenerate { rank: usize, dim: usize },

    /// The cone contains a line.
    #[error("cone is not pointed")]
    NotPointed,

    /// A vector expected in the open dual cone is not there.
    #[error("vector is outside the open dual cone")]
    OutsideDual,

    /// A vector expected in the interior of the cone is not there.
    #[error("vector is not in the interior of the cone")]
    NotInterior,

    /// A dual vector lies too close to the dual boundary for a stable evaluation.
    #[error("ill-conditioned evaluation: v.w = {value:e} below tolerance {tolerance:e}")]
    Conditioning { value: f64, tolerance: f64 },

    /// Newton iteration stopped without meeting its tolerance.
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// A configured work budget would be exceeded.
    #[error("budget exceeded: {what} needs {needed}, budget {budget}")]
    Budget { what: &'static str, needed: u128, budget: u128 },

    /// Rejection sampling ran out of attempts.
    #[error("no acceptance within {attempts} attempts")]
    Timeout { attempts: u64 },

    /// Polytope vertices are not in convex position.
    #[error("input points are not in convex position")]
    NonConvex,

    /// Profiles were sampled on different direction nets.
    #[error("direction nets differ")]
    NetMismatch,

    /// Requested dimension is not supported by the operation.
    #[error("dimension {0} is not supported here")]
    UnsupportedDimension(usize),

    /// Integer arithmetic would overflow the fixed-width fast path.
    #[error("integer overflow in exact predicate")]
    Overflow,

    /// Malformed JSON input.
    #[error("parse error: {0}")]
    Parse(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
