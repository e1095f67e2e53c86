//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by geometry, sampling and rate-function routines.
#[derive(Debug, Clone, Error)]
pub enum GeoError {
    /// The requested operation is ill-posed on the cut locus (e.g. the
    /// minimizing geodesic between antipodal sphere points is not unique).
    #[error("cut locus: {0}")]
    CutLocus(String),

    /// Invalid configuration or inputs.
    #[error("config error: {0}")]
    Config(String),

    /// A documented precondition was violated (programming error at the call site).
    #[error("contract violation: {0}")]
    Contract(String),

    /// An iterative solver failed to converge.
    #[error("no convergence after {iterations} iterations (|grad| = {grad_norm:.3e})")]
    NoConvergence { iterations: usize, grad_norm: f64 },

    /// A quantity overflowed or became non-finite.
    #[error("numerical overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, GeoError>;
