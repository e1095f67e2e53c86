//! Rate-function numerics.
//!
//! For an increment law with log-MGF Lambda, the weighted-walk analogue is
//!
//! ```text
//! Psi(lam) = E[Lambda(Z lam)],   Z ~ N(0,1),
//! ```
//!
//! computed with a probabilists' Gauss-Hermite rule. Its convex conjugate
//! `Psi*` is the universal rate function on vector spaces; the manifold rate
//! takes the infimum of `Psi*` over exponential-map preimages. The projection
//! and product rates of the k-dimensional comparison reduce to one-dimensional
//! conjugates and share the same solver.
//!
//! `Psi*` is computed by damped Newton with backtracking on the concave
//! objective `<lam, v> - Psi(lam)` (Hessian by central differences of the
//! quadrature gradient), with multi-start as a hedge against flat starts.
//! Divergence is decided analytically for bounded laws — the support bound
//! gives `Psi(lam) <= r E|Z| |lam|`, so the conjugate is +infinity for
//! `|v| >= r E|Z|` — and by an objective cap for unbounded laws.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{GeoError, Result};
use crate::increments::IncrementLaw;
use crate::manifold::{ManifoldModel, Point};
use crate::quadrature::GaussHermite;
use crate::weights::WeightRow;

/// E|Z| for standard normal Z.
pub fn mean_abs_normal() -> f64 {
    (2.0 / std::f64::consts::PI).sqrt()
}

/// Margin added to the preimage search bound so boundary preimages are not
/// lost to rounding.
const PREIMAGE_MARGIN: f64 = 1e-9;

/// Objective value beyond which an ascent is declared divergent.
const DIVERGENCE_CAP: f64 = 1e6;

const MAX_ITERATIONS: usize = 500;

/// A law/dimension/quadrature bundle on which Psi and its conjugates are
/// evaluated.
#[derive(Debug, Clone)]
pub struct RateProblem {
    pub dim: usize,
    pub law: IncrementLaw,
    pub quad: GaussHermite,
}

/// Outcome of a Legendre-transform evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct LegendreResult {
    /// sup over lambda; +infinity when divergent.
    pub value: f64,
    /// Maximizer, absent for divergent problems.
    pub argmax: Option<Vec<f64>>,
    pub iterations: usize,
    pub converged: bool,
    pub divergent: bool,
}

impl LegendreResult {
    fn divergent() -> Self {
        LegendreResult {
            value: f64::INFINITY,
            argmax: None,
            iterations: 0,
            converged: true,
            divergent: true,
        }
    }
}

/// Manifold rate I_M(x): the infimum of Psi* over exp-preimages of x.
#[derive(Debug, Clone, Serialize)]
pub struct ManifoldRate {
    pub value: f64,
    /// Number of preimages inside the search bound.
    pub preimages: usize,
    /// Frame coordinates of the minimizing preimage, when finite.
    pub argmin: Option<Vec<f64>>,
    pub degenerate: bool,
}

impl RateProblem {
    /// Default 64-node rule.
    pub fn new(dim: usize, law: IncrementLaw) -> Result<Self> {
        Self::with_nodes(dim, law, 64)
    }

    pub fn with_nodes(dim: usize, law: IncrementLaw, nodes: usize) -> Result<Self> {
        law.validate_dim(dim)?;
        Ok(RateProblem { dim, law, quad: GaussHermite::new(nodes)? })
    }

    /// Psi(lam) = sum_q w_q Lambda(z_q lam).
    pub fn psi(&self, lam: &[f64]) -> f64 {
        debug_assert_eq!(lam.len(), self.dim);
        let mut scaled = vec![0.0; lam.len()];
        self.quad
            .nodes
            .iter()
            .zip(&self.quad.weights)
            .map(|(&z, &w)| {
                for (s, &l) in scaled.iter_mut().zip(lam) {
                    *s = z * l;
                }
                w * self.law.logmgf(&scaled)
            })
            .sum()
    }

    /// grad Psi(lam) = sum_q w_q z_q grad Lambda(z_q lam).
    pub fn grad_psi(&self, lam: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; lam.len()];
        let mut scaled = vec![0.0; lam.len()];
        for (&z, &w) in self.quad.nodes.iter().zip(&self.quad.weights) {
            for (s, &l) in scaled.iter_mut().zip(lam) {
                *s = z * l;
            }
            let g = self.law.grad_logmgf(&scaled);
            for (o, gi) in out.iter_mut().zip(g) {
                *o += w * z * gi;
            }
        }
        out
    }

    /// |Psi_Q - Psi_2Q| at this problem's Q; the accuracy guard for the rule.
    pub fn psi_doubling_gap(&self, lam: &[f64]) -> Result<f64> {
        let doubled =
            RateProblem { dim: self.dim, law: self.law.clone(), quad: GaussHermite::new(2 * self.quad.len())? };
        Ok((self.psi(lam) - doubled.psi(lam)).abs())
    }

    /// Legendre transform Psi*(v) = sup_lam { <lam, v> - Psi(lam) }.
    pub fn psi_star(&self, v: &[f64]) -> Result<LegendreResult> {
        if v.len() != self.dim {
            return Err(GeoError::Config(format!(
                "psi_star point has dimension {}, problem has {}",
                v.len(),
                self.dim
            )));
        }
        let vnorm = norm(v);
        // Analytic divergence rule for bounded laws.
        if self.law.is_bounded() && vnorm >= self.law.support_radius() * mean_abs_normal() {
            return Ok(LegendreResult::divergent());
        }

        let vmax = vnorm.max(1.0);
        let starts: Vec<Vec<f64>> = vec![
            vec![0.0; self.dim],
            v.to_vec(),
            v.iter().map(|x| -x).collect(),
            v.iter().map(|x| 2.0 * x / vmax).collect(),
        ];

        let mut best: Option<LegendreResult> = None;
        let mut total_iterations = 0;
        for start in starts {
            let budget = MAX_ITERATIONS.saturating_sub(total_iterations);
            if budget == 0 {
                break;
            }
            match self.newton_ascent(v, &start, budget) {
                AscentOutcome::Divergent => return Ok(LegendreResult::divergent()),
                AscentOutcome::Converged { lam, value, iterations } => {
                    total_iterations += iterations;
                    let better = best.as_ref().map_or(true, |b| value > b.value);
                    if better {
                        best = Some(LegendreResult {
                            value,
                            argmax: Some(lam),
                            iterations: total_iterations,
                            converged: true,
                            divergent: false,
                        });
                    }
                }
                AscentOutcome::Stalled { grad_norm, iterations } => {
                    total_iterations += iterations;
                    if total_iterations >= MAX_ITERATIONS && best.is_none() {
                        return Err(GeoError::NoConvergence {
                            iterations: total_iterations,
                            grad_norm,
                        });
                    }
                }
            }
        }
        best.ok_or(GeoError::NoConvergence { iterations: total_iterations, grad_norm: f64::NAN })
    }

    fn objective(&self, v: &[f64], lam: &[f64]) -> f64 {
        dot(lam, v) - self.psi(lam)
    }

    fn newton_ascent(&self, v: &[f64], start: &[f64], budget: usize) -> AscentOutcome {
        let d = self.dim;
        let tol = 1e-10 * (1.0 + norm(v));
        let mut lam = start.to_vec();
        let mut value = self.objective(v, &lam);
        if !value.is_finite() {
            lam = vec![0.0; d];
            value = 0.0;
        }
        let mut grad_norm = f64::NAN;
        for it in 0..budget.max(1) {
            if value > DIVERGENCE_CAP {
                return AscentOutcome::Divergent;
            }
            let grad: Vec<f64> = {
                let gp = self.grad_psi(&lam);
                v.iter().zip(gp).map(|(vi, gi)| vi - gi).collect()
            };
            grad_norm = norm(&grad);
            if grad_norm <= tol {
                return AscentOutcome::Converged { lam, value, iterations: it };
            }

            let dir = self.newton_direction(&lam, &grad).unwrap_or_else(|| grad.clone());
            let slope = dot(&dir, &grad);
            let (dir, slope) =
                if slope <= 0.0 { (grad.clone(), grad_norm * grad_norm) } else { (dir, slope) };

            // backtracking Armijo line search on the concave objective; the
            // strict-improvement clause stops underflowing micro-steps from
            // being accepted forever near the optimum
            let mut step = 1.0;
            let mut advanced = false;
            for _ in 0..60 {
                let cand: Vec<f64> =
                    lam.iter().zip(&dir).map(|(l, di)| l + step * di).collect();
                let cand_value = self.objective(v, &cand);
                if cand_value.is_finite()
                    && cand_value >= value + 1e-4 * step * slope
                    && cand_value > value
                {
                    lam = cand;
                    value = cand_value;
                    advanced = true;
                    break;
                }
                step *= 0.5;
            }
            if !advanced {
                // the step underflowed: either we are at the optimum up to
                // rounding, or the objective is too flat to improve
                return if grad_norm <= 1e-6 * (1.0 + norm(v)) {
                    AscentOutcome::Converged { lam, value, iterations: it + 1 }
                } else {
                    AscentOutcome::Stalled { grad_norm, iterations: it + 1 }
                };
            }
        }
        AscentOutcome::Stalled { grad_norm, iterations: budget.max(1) }
    }

    /// Solve (hess Psi) d = grad via a central-difference Hessian.
    fn newton_direction(&self, lam: &[f64], grad: &[f64]) -> Option<Vec<f64>> {
        let d = self.dim;
        let h = 1e-5 * (1.0 + norm(lam));
        let mut hess = DMatrix::<f64>::zeros(d, d);
        for j in 0..d {
            let mut up = lam.to_vec();
            let mut dn = lam.to_vec();
            up[j] += h;
            dn[j] -= h;
            let gu = self.grad_psi(&up);
            let gd = self.grad_psi(&dn);
            for i in 0..d {
                hess[(i, j)] = (gu[i] - gd[i]) / (2.0 * h);
            }
        }
        // symmetrize the finite-difference noise away
        for i in 0..d {
            for j in (i + 1)..d {
                let s = 0.5 * (hess[(i, j)] + hess[(j, i)]);
                hess[(i, j)] = s;
                hess[(j, i)] = s;
            }
        }
        let rhs = DVector::from_column_slice(grad);
        let sol = hess.lu().solve(&rhs)?;
        if sol.iter().all(|x| x.is_finite()) {
            Some(sol.iter().copied().collect())
        } else {
            None
        }
    }

    /// Manifold rate I_M(x) = inf { Psi*(v) : exp_{x0}(v) = x }, enumerating
    /// preimages up to the divergence bound r E|Z| (plus margin).
    pub fn rate_manifold(&self, m: &ManifoldModel, x0: &Point, x: &Point) -> Result<ManifoldRate> {
        if !self.law.is_bounded() {
            return Err(GeoError::Config(
                "rate_manifold needs a bounded increment law".into(),
            ));
        }
        if m.dim() != self.dim {
            return Err(GeoError::Config(format!(
                "manifold dimension {} does not match problem dimension {}",
                m.dim(),
                self.dim
            )));
        }
        let bound = self.law.support_radius() * mean_abs_normal() + PREIMAGE_MARGIN;
        let preimages = m.log_all(x0, x, bound)?;
        let frame = m.orthonormal_frame(x0);
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut degenerate = false;
        for p in &preimages {
            // Degenerate (continuum) preimages are evaluated on the stored
            // representative: isotropy rules make Psi* direction-independent.
            degenerate |= p.degenerate;
            let coords = m.frame_coords(&frame, &p.vector);
            let res = self.psi_star(&coords)?;
            if res.value.is_finite() && best.as_ref().map_or(true, |(b, _)| res.value < *b) {
                best = Some((res.value, coords));
            }
        }
        Ok(match best {
            Some((value, argmin)) => ManifoldRate {
                value,
                preimages: preimages.len(),
                argmin: Some(argmin),
                degenerate,
            },
            None => ManifoldRate {
                value: f64::INFINITY,
                preimages: preimages.len(),
                argmin: None,
                degenerate,
            },
        })
    }
}

enum AscentOutcome {
    Converged { lam: Vec<f64>, value: f64, iterations: usize },
    Stalled { grad_norm: f64, iterations: usize },
    Divergent,
}

/// Projection rate for i.i.d. scalar coordinates:
///
/// ```text
/// I_proj(v) = sup_lam { <lam, v> - E[Lambda(|lam| Z)] } = Psi_1*(|v|),
/// ```
///
/// the radial reduction of the k-dimensional problem (the objective depends on
/// lam only through <lam, v> and |lam|, and the optimum aligns lam with v).
pub fn rate_proj(law1: &IncrementLaw, k: usize, v: &[f64], nodes: usize) -> Result<LegendreResult> {
    if v.len() != k {
        return Err(GeoError::Config(format!("v has length {}, expected k = {k}", v.len())));
    }
    let problem = RateProblem::with_nodes(1, law1.clone(), nodes)?;
    let vnorm = norm(v);
    let radial = problem.psi_star(&[vnorm])?;
    let argmax = radial.argmax.as_ref().map(|s| {
        if vnorm == 0.0 {
            vec![0.0; k]
        } else {
            v.iter().map(|x| s[0] * x / vnorm).collect()
        }
    });
    Ok(LegendreResult { argmax, ..radial })
}

/// Product rate for mu = mu_1^(x k): by independence the supremum separates
/// into k one-dimensional conjugates, I_k(v) = sum_i Psi_1*(v_i).
pub fn rate_k(law1: &IncrementLaw, k: usize, v: &[f64], nodes: usize) -> Result<LegendreResult> {
    if v.len() != k {
        return Err(GeoError::Config(format!("v has length {}, expected k = {k}", v.len())));
    }
    let problem = RateProblem::with_nodes(1, law1.clone(), nodes)?;
    let mut value = 0.0;
    let mut argmax = Vec::with_capacity(k);
    let mut iterations = 0;
    let mut converged = true;
    for &vi in v {
        let res = problem.psi_star(&[vi])?;
        iterations += res.iterations;
        converged &= res.converged;
        if res.divergent {
            return Ok(LegendreResult::divergent());
        }
        value += res.value;
        argmax.push(res.argmax.map_or(0.0, |a| a[0]));
    }
    Ok(LegendreResult { value, argmax: Some(argmax), iterations, converged, divergent: false })
}

/// Exact normalized log-MGF of the prefix-weighted walk: by independence,
///
/// ```text
/// (1/n) log E[exp(n <lam, W_{floor(n/k)}>)] = (1/n) sum_{i <= floor(n/k)} Lambda(sqrt(n) theta_i lam),
/// ```
///
/// the quantity whose n-limit is Psi(lam)/k.
pub fn mgf_log_exact(row: &WeightRow, law: &IncrementLaw, lam: &[f64], k: usize) -> Result<f64> {
    if k == 0 {
        return Err(GeoError::Config("prefix fraction 1/k needs k >= 1".into()));
    }
    law.validate_dim(lam.len())?;
    let n = row.n;
    let l = n / k;
    let root_n = (n as f64).sqrt();
    let mut scaled = vec![0.0; lam.len()];
    let mut sum = 0.0;
    for &theta in row.theta.iter().take(l) {
        for (s, &li) in scaled.iter_mut().zip(lam) {
            *s = root_n * theta * li;
        }
        let term = law.logmgf(&scaled);
        if !term.is_finite() {
            return Err(GeoError::Overflow(format!(
                "log-MGF overflowed at scaled argument {:.3e}",
                root_n * theta
            )));
        }
        sum += term;
    }
    Ok(sum / n as f64)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn gaussian_problem(dim: usize) -> RateProblem {
        RateProblem::new(dim, IncrementLaw::Gaussian { variance: 1.0 }).unwrap()
    }

    #[test]
    fn psi_gaussian_is_half_square() {
        // Lambda(t) = t^2/2 in dim 1, so Psi(lam) = lam^2/2 (E[Z^2] = 1), and
        // the quadrature is exact for quadratics.
        let p = gaussian_problem(1);
        for lam in [0.0, 0.5, -1.0, 3.0] {
            assert_abs_diff_eq!(p.psi(&[lam]), 0.5 * lam * lam, epsilon = 1e-12);
        }
    }

    #[test]
    fn psi_poisson_product_closed_form() {
        let p = RateProblem::new(2, IncrementLaw::Poisson { rate: 1.0 }).unwrap();
        let lam = [1.0, 2.0];
        let want = (0.5f64).exp() + (2.0f64).exp() - 2.0;
        assert_abs_diff_eq!(p.psi(&lam), want, epsilon = 1e-10);
    }

    #[test]
    fn psi_rademacher_matches_independent_oracle() {
        // E[log cosh(Z lam)] frozen from 30-digit quadrature.
        let p = RateProblem::new(1, IncrementLaw::Rademacher { r: 1.0 }).unwrap();
        assert_abs_diff_eq!(p.psi(&[0.3]), 0.0431807878463243871, epsilon = 1e-10);
        assert_abs_diff_eq!(p.psi(&[0.7]), 0.205874953283381378, epsilon = 1e-10);
        assert_abs_diff_eq!(p.psi(&[1.0]), 0.374567207491437974, epsilon = 1e-10);
    }

    #[test]
    fn psi_symmetry_and_zero() {
        let laws = [
            IncrementLaw::Rademacher { r: 1.0 },
            IncrementLaw::Poisson { rate: 1.0 },
            IncrementLaw::Shell { r: 1.0 },
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for law in laws {
            let dim = if matches!(law, IncrementLaw::Rademacher { .. }) { 1 } else { 2 };
            let p = RateProblem::new(dim, law).unwrap();
            assert_eq!(p.psi(&vec![0.0; dim]), 0.0);
            for _ in 0..50 {
                let lam: Vec<f64> = (0..dim).map(|_| 4.0 * (rng.random::<f64>() - 0.5)).collect();
                let neg: Vec<f64> = lam.iter().map(|x| -x).collect();
                assert!((p.psi(&lam) - p.psi(&neg)).abs() <= 1e-12 * (1.0 + p.psi(&lam).abs()));
            }
        }
    }

    #[test]
    fn psi_convexity_midpoint() {
        let p = RateProblem::new(2, IncrementLaw::Shell { r: 1.0 }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..1000 {
            let a: Vec<f64> = (0..2).map(|_| 6.0 * (rng.random::<f64>() - 0.5)).collect();
            let b: Vec<f64> = (0..2).map(|_| 6.0 * (rng.random::<f64>() - 0.5)).collect();
            let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
            let slack = 0.5 * p.psi(&a) + 0.5 * p.psi(&b) - p.psi(&mid);
            assert!(slack >= -1e-10, "convexity violated by {slack}");
        }
    }

    #[test]
    fn psi_star_gaussian_closed_form() {
        let p = gaussian_problem(2);
        let res = p.psi_star(&[1.0, 2.0]).unwrap();
        assert!(res.converged && !res.divergent);
        assert_abs_diff_eq!(res.value, 2.5, epsilon = 1e-9);
        let am = res.argmax.unwrap();
        assert_abs_diff_eq!(am[0], 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(am[1], 2.0, epsilon = 1e-6);
    }

    #[test]
    fn psi_star_at_zero_is_zero_even_with_drift() {
        // Poisson increments have mean 1, but grad Psi(0) = E[Z] grad Lambda(0) = 0.
        for law in [
            IncrementLaw::Poisson { rate: 1.0 },
            IncrementLaw::Gaussian { variance: 2.0 },
            IncrementLaw::Shell { r: 1.0 },
        ] {
            let p = RateProblem::new(2, law).unwrap();
            let res = p.psi_star(&[0.0, 0.0]).unwrap();
            assert!(res.converged);
            assert_abs_diff_eq!(res.value, 0.0, epsilon = 1e-12);
            let am = res.argmax.unwrap();
            assert!(norm(&am) <= 1e-8);
        }
    }

    #[test]
    fn psi_star_divergence_rule() {
        let p = RateProblem::new(1, IncrementLaw::Rademacher { r: 1.0 }).unwrap();
        // E|Z| = sqrt(2/pi) ~ 0.7979
        let res = p.psi_star(&[0.9]).unwrap();
        assert!(res.divergent);
        assert_eq!(res.value, f64::INFINITY);
        assert!(res.argmax.is_none());
        // just below the bound the transform is finite
        let res = p.psi_star(&[0.75]).unwrap();
        assert!(!res.divergent && res.value.is_finite());
    }

    #[test]
    fn fenchel_young_inequality() {
        let p = RateProblem::new(2, IncrementLaw::Shell { r: 1.0 }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cap = mean_abs_normal();
        for _ in 0..100 {
            let v: Vec<f64> = (0..2).map(|_| cap * 0.9 * (rng.random::<f64>() - 0.5)).collect();
            let lam: Vec<f64> = (0..2).map(|_| 6.0 * (rng.random::<f64>() - 0.5)).collect();
            let star = p.psi_star(&v).unwrap();
            if !star.value.is_finite() {
                continue;
            }
            assert!(dot(&lam, &v) <= p.psi(&lam) + star.value + 1e-8);
        }
    }

    #[test]
    fn grid_oracle_agreement_dim1() {
        // dense-grid Legendre transform on [-20, 20], step 1e-3
        let laws = [
            IncrementLaw::Rademacher { r: 1.0 },
            IncrementLaw::Gaussian { variance: 1.0 },
            IncrementLaw::Poisson { rate: 1.0 },
        ];
        for law in laws {
            let p = RateProblem::new(1, law.clone()).unwrap();
            let probes: Vec<f64> = match law {
                IncrementLaw::Rademacher { .. } => vec![0.0, 0.2, 0.45, 0.6],
                _ => vec![-1.0, 0.0, 0.7, 1.8],
            };
            let grid: Vec<(f64, f64)> = (-20_000..=20_000)
                .map(|i| {
                    let lam = i as f64 * 1e-3;
                    (lam, p.psi(&[lam]))
                })
                .collect();
            for v in probes {
                let oracle = grid
                    .iter()
                    .map(|&(lam, psi)| lam * v - psi)
                    .fold(f64::NEG_INFINITY, f64::max);
                let solved = p.psi_star(&[v]).unwrap();
                assert!(
                    (solved.value - oracle).abs() <= 1e-4,
                    "{law:?} at v={v}: solver {} vs grid {oracle}",
                    solved.value
                );
            }
        }
    }

    #[test]
    fn quadrature_doubling_gap_is_small_on_probe_ranges() {
        // Entire log-MGFs converge superexponentially up to |lam| = 5; the
        // two-point law's strip of analyticity shrinks like 1/|lam|, so its
        // probes stay within |lam| <= 1 (the range the corollary checks use).
        let p = gaussian_problem(1);
        for lam in [0.5, 2.0, 5.0] {
            assert!(p.psi_doubling_gap(&[lam]).unwrap() <= 1e-10);
        }
        let p = RateProblem::new(2, IncrementLaw::Poisson { rate: 1.0 }).unwrap();
        for lam in [[0.5, -0.5], [3.0, 4.0], [5.0, 0.0]] {
            assert!(p.psi_doubling_gap(&lam).unwrap() <= 1e-10);
        }
        let p = RateProblem::new(1, IncrementLaw::Rademacher { r: 1.0 }).unwrap();
        for lam in [0.3, 0.7, 1.0] {
            assert!(p.psi_doubling_gap(&[lam]).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn rate_manifold_examples() {
        let law = IncrementLaw::Shell { r: 1.0 };
        // Euclidean: unique preimage, rate = psi_star(x - x0)
        let e = ManifoldModel::euclidean(2).unwrap();
        let p = RateProblem::new(2, law.clone()).unwrap();
        let x0 = e.base_point();
        let x = e.point(vec![0.3, -0.2]).unwrap();
        let rate = p.rate_manifold(&e, &x0, &x).unwrap();
        let direct = p.psi_star(&[0.3, -0.2]).unwrap();
        assert_eq!(rate.preimages, 1);
        assert_abs_diff_eq!(rate.value, direct.value, epsilon = 1e-10);

        // x = x0: the zero preimage gives rate 0
        let rate = p.rate_manifold(&e, &x0, &x0).unwrap();
        assert_abs_diff_eq!(rate.value, 0.0, epsilon = 1e-12);

        // unit sphere at distance 1 > E|Z|: every preimage is divergent
        let s = ManifoldModel::sphere(2, 1.0).unwrap();
        let p = RateProblem::new(2, law).unwrap();
        let sx0 = s.base_point();
        let v = s.tangent(&sx0, vec![1.0, 0.0, 0.0]).unwrap();
        let sx = s.exp(&sx0, &v).unwrap();
        let rate = p.rate_manifold(&s, &sx0, &sx).unwrap();
        assert_eq!(rate.value, f64::INFINITY);
        assert_eq!(rate.preimages, 0);
    }

    #[test]
    fn rate_proj_normal_closed_form() {
        let law = IncrementLaw::Gaussian { variance: 1.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for k in 1..=3 {
            for _ in 0..10 {
                let v: Vec<f64> = (0..k).map(|_| 3.0 * (rng.random::<f64>() - 0.5)).collect();
                let res = rate_proj(&law, k, &v, 64).unwrap();
                let want = 0.5 * dot(&v, &v);
                assert!((res.value - want).abs() <= 1e-6, "k={k} v={v:?}: {}", res.value);
            }
        }
    }

    #[test]
    fn poisson_golden_values() {
        let law = IncrementLaw::Poisson { rate: 1.0 };
        let ik = rate_k(&law, 2, &[1.0, 2.0], 64).unwrap();
        assert_abs_diff_eq!(ik.value, 1.7939985459879462, epsilon = 1e-8);
        let root2 = (2.0f64).sqrt();
        let proj = rate_proj(&law, 2, &[1.0 / root2, 2.0 / root2], 64).unwrap();
        assert_abs_diff_eq!(2.0 * proj.value, 1.8662395206372553, epsilon = 1e-8);
    }

    #[test]
    fn diagonal_identity() {
        let law = IncrementLaw::Poisson { rate: 1.0 };
        for k in [2usize, 3] {
            for c in [0.5, 1.0, 2.0] {
                let ones = vec![c; k];
                let ik = rate_k(&law, k, &ones, 64).unwrap();
                let scaled: Vec<f64> = ones.iter().map(|x| x / (k as f64).sqrt()).collect();
                let proj = rate_proj(&law, k, &scaled, 64).unwrap();
                assert!(
                    (ik.value - k as f64 * proj.value).abs() <= 1e-4,
                    "k={k} c={c}: {} vs {}",
                    ik.value,
                    k as f64 * proj.value
                );
            }
        }
    }

    #[test]
    fn mgf_log_exact_cases() {
        let law = IncrementLaw::Rademacher { r: 1.0 };
        let row = WeightRow::sample(1000, 3).unwrap();
        // lam = 0 -> 0 exactly
        assert_eq!(mgf_log_exact(&row, &law, &[0.0], 1).unwrap(), 0.0);
        // degenerate row theta = e_1: Lambda(sqrt(n) lam) / n
        let mut e1 = vec![0.0; 9];
        e1[0] = 1.0;
        let row = WeightRow::fixed(e1, 0).unwrap();
        let got = mgf_log_exact(&row, &law, &[0.7], 1).unwrap();
        let want = law.logmgf(&[3.0 * 0.7]) / 9.0;
        assert_abs_diff_eq!(got, want, epsilon = 1e-15);
        // k = 4 restricts the sum to the first quarter
        let row = WeightRow::sample(100, 5).unwrap();
        let full = mgf_log_exact(&row, &law, &[0.5], 1).unwrap();
        let quarter = mgf_log_exact(&row, &law, &[0.5], 4).unwrap();
        assert!(quarter < full);
        // overflow is flagged for unbounded laws at extreme arguments
        let law = IncrementLaw::Poisson { rate: 1.0 };
        let row = WeightRow::sample(10_000, 6).unwrap();
        assert!(matches!(
            mgf_log_exact(&row, &law, &[800.0], 1),
            Err(GeoError::Overflow(_))
        ));
    }

    #[test]
    fn corollary_convergence_smoke() {
        // |mgf_log_exact - Psi/k| shrinks with n for the Rademacher law.
        let law = IncrementLaw::Rademacher { r: 1.0 };
        let p = RateProblem::new(1, law.clone()).unwrap();
        let psi = p.psi(&[0.7]);
        let mut errs = Vec::new();
        for n in [1000usize, 100_000] {
            let mut worst = 0.0f64;
            for seed in 0..5 {
                let row = WeightRow::sample(n, seed).unwrap();
                let got = mgf_log_exact(&row, &law, &[0.7], 1).unwrap();
                worst = worst.max((got - psi).abs());
            }
            errs.push(worst);
        }
        assert!(errs[1] < errs[0]);
        assert!(errs[1] <= 0.02);
    }
}
