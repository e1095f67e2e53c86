//! Weighted geodesic random walks on model Riemannian manifolds and the
//! universal large-deviation rate functions attached to them.
//!
//! The crate is organized along the pipeline:
//!
//! - [`manifold`] — closed-form exp/log/parallel-transport kernel for the
//!   Euclidean, spherical and hyperbolic model spaces;
//! - [`increments`] — transport-invariant increment laws with samplers and
//!   log-moment generating functions;
//! - [`weights`] — uniform weight rows on S^(n-1) and their scalings;
//! - [`walk`] — the walk simulator plus the tangent-space comparison
//!   machinery (pullbacks, chained transports, piece sums, reconstructions);
//! - [`rates`] — Psi via Gauss-Hermite quadrature, Legendre transforms, and
//!   the manifold / projection / product rate functions;
//! - [`experiments`] — batch verification harnesses with seeded, reproducible
//!   Monte Carlo;
//! - [`verify`] — the acceptance checklist run by `georate verify` and by the
//!   integration test suite.

pub mod error;
pub mod experiments;
pub mod increments;
pub mod manifold;
pub mod quadrature;
pub mod rates;
pub mod verify;
pub mod walk;
pub mod weights;

pub use error::{GeoError, Result};

/// Format a number with 12 significant digits, the convention for all CSV and
/// table output.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x:.11e}")
}

/// Derive a per-trial RNG seed from a master seed (splitmix64 step).
pub fn trial_seed(master_seed: u64, trial: u64) -> u64 {
    let mut z = master_seed ^ trial.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
