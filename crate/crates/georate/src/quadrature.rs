//! Quadrature rules: Gauss-Hermite for expectations against the standard
//! normal density, and Gauss-Legendre for finite intervals.

use nalgebra::DMatrix;

use crate::error::{GeoError, Result};

/// Probabilists' Gauss-Hermite rule: nodes z_q and weights w_q with
/// `sum_q w_q f(z_q) ~ E[f(Z)]`, Z ~ N(0,1). Exact for polynomials of degree
/// 2Q-1. Nodes are symmetrized about 0 exactly so that mirror-symmetric sums
/// agree bitwise.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Golub-Welsch: the Jacobi matrix for the probabilists' Hermite recurrence
    /// has zero diagonal and off-diagonal sqrt(k); eigenvalues are the nodes and
    /// squared first eigenvector components the weights.
    pub fn new(q: usize) -> Result<Self> {
        if q == 0 {
            return Err(GeoError::Config("quadrature needs at least one node".into()));
        }
        let mut jacobi = DMatrix::<f64>::zeros(q, q);
        for k in 1..q {
            let off = (k as f64).sqrt();
            jacobi[(k - 1, k)] = off;
            jacobi[(k, k - 1)] = off;
        }
        let eigen = jacobi.symmetric_eigen();
        let mut pairs: Vec<(f64, f64)> = eigen
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(i, &z)| (z, eigen.eigenvectors[(0, i)].powi(2)))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

        // enforce exact mirror symmetry
        let mut nodes = vec![0.0; q];
        let mut weights = vec![0.0; q];
        for i in 0..q / 2 {
            let j = q - 1 - i;
            let z = 0.5 * (pairs[j].0 - pairs[i].0);
            let w = 0.5 * (pairs[i].1 + pairs[j].1);
            nodes[i] = -z;
            nodes[j] = z;
            weights[i] = w;
            weights[j] = w;
        }
        if q % 2 == 1 {
            nodes[q / 2] = 0.0;
            weights[q / 2] = pairs[q / 2].1;
        }
        Ok(GaussHermite { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// E[f(Z)] under the quadrature rule.
    pub fn expectation<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&z, &w)| w * f(z)).sum()
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Integrate `f` over [a, b] with a fixed-order Gauss-Legendre rule.
pub fn integrate_gl<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, nodes: &[f64], weights: &[f64]) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    nodes.iter().zip(weights).map(|(&x, &w)| w * f(mid + half * x)).sum::<f64>() * half
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn hermite_matches_normal_moments() {
        for q in [16, 32, 64, 128] {
            let gh = GaussHermite::new(q).unwrap();
            let wsum: f64 = gh.weights.iter().sum();
            assert_abs_diff_eq!(wsum, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(gh.expectation(|z| z), 0.0, epsilon = 1e-13);
            assert_abs_diff_eq!(gh.expectation(|z| z * z), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(gh.expectation(|z| z.powi(4)), 3.0, epsilon = 1e-11);
            // E[e^Z] = sqrt(e)
            assert_abs_diff_eq!(
                gh.expectation(f64::exp),
                (1.0f64).exp().sqrt(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn hermite_nodes_are_exactly_symmetric() {
        let gh = GaussHermite::new(64).unwrap();
        for i in 0..32 {
            assert_eq!(gh.nodes[i], -gh.nodes[63 - i]);
            assert_eq!(gh.weights[i], gh.weights[63 - i]);
        }
    }

    #[test]
    fn hermite_two_nodes_closed_form() {
        let gh = GaussHermite::new(2).unwrap();
        assert_abs_diff_eq!(gh.nodes[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(gh.nodes[1], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(gh.weights[0], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn legendre_integrates_polynomials_and_cosine() {
        let (x, w) = gauss_legendre(24);
        let wsum: f64 = w.iter().sum();
        assert_abs_diff_eq!(wsum, 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(integrate_gl(|t| t * t, -1.0, 1.0, &x, &w), 2.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            integrate_gl(f64::cos, -1.0, 1.0, &x, &w),
            2.0 * (1.0f64).sin(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            integrate_gl(f64::exp, 0.0, 2.0, &x, &w),
            (2.0f64).exp() - 1.0,
            epsilon = 1e-12
        );
    }
}
