//! The weighted geodesic random walk and its tangent-space companions.
//!
//! A walk of length n with weight row theta starts at x0 and iterates
//!
//! ```text
//! S_k = exp(S_{k-1}, (theta_k / sqrt(n)) X_k),    X_k ~ mu_{S_{k-1}},
//! ```
//!
//! where the increments are drawn in an orthonormal frame that is parallel
//! transported along the walk, so that pulling an increment back to the base
//! point always yields a sample of the base-point law.
//!
//! On top of the simulator this module builds the comparison machinery between
//! the walk and weighted random walks in the tangent space at x0: minimal
//! pullback vectors per partition piece, the chained transports tau_RW through
//! the cut points, the piece sums Y_i and Y-bar_i, the two piecewise-geodesic
//! reconstruction maps, and the tangent discrepancy profile.

use std::io::Write;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::increments::IncrementLaw;
use crate::manifold::{add_scaled, scaled, ManifoldModel, Point, Tangent};
use crate::weights::WeightRow;

/// One realization of a weighted geodesic random walk.
#[derive(Debug, Clone)]
pub struct WalkPath {
    pub manifold: ManifoldModel,
    pub law: IncrementLaw,
    pub x0: Point,
    pub row: WeightRow,
    /// X_1..X_n; X_k is based at S_{k-1} and |X_k| <= support_radius.
    pub increments: Vec<Tangent>,
    /// S_0..S_n.
    pub points: Vec<Point>,
    pub support_radius: f64,
    /// Seed of the increment RNG stream (the row carries its own seed).
    pub seed: u64,
}

/// Partition of 1..n into m pieces at cut points n_i = i * floor(n/m), n_m = n.
#[derive(Debug, Clone)]
pub struct Partition {
    pub m: usize,
    /// floor(n/m).
    pub piece_len: usize,
    /// n_0 = 0, n_1, ..., n_m = n.
    pub cuts: Vec<usize>,
}

impl Partition {
    /// Build the partition, rejecting it unless r / sqrt(m) is strictly below
    /// the injectivity radius (uniqueness of the per-piece pullbacks).
    pub fn new(n: usize, m: usize, support_radius: f64, manifold: &ManifoldModel) -> Result<Self> {
        if m == 0 || m > n {
            return Err(GeoError::Config(format!("partition needs 1 <= m <= n, got m={m}, n={n}")));
        }
        let iota = manifold.injectivity_radius();
        if !(support_radius / (m as f64).sqrt() < iota) {
            return Err(GeoError::Config(format!(
                "partition invalid: r/sqrt(m) = {} is not below the injectivity radius {}",
                support_radius / (m as f64).sqrt(),
                iota
            )));
        }
        let piece_len = n / m;
        let mut cuts: Vec<usize> = (0..m).map(|i| i * piece_len).collect();
        cuts.push(n);
        Ok(Partition { m, piece_len, cuts })
    }
}

impl WalkPath {
    /// Simulate a walk. Deterministic in (row, seed): the same pair always
    /// produces the identical path.
    pub fn generate(
        manifold: &ManifoldModel,
        law: &IncrementLaw,
        row: &WeightRow,
        x0: &Point,
        seed: u64,
    ) -> Result<WalkPath> {
        law.validate_for_walk(manifold)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = row.n;
        let scale = 1.0 / (n as f64).sqrt();
        let mut points = Vec::with_capacity(n + 1);
        let mut increments = Vec::with_capacity(n);
        points.push(x0.clone());
        let mut frame = manifold.orthonormal_frame(x0);
        for k in 0..n {
            let here = points[k].clone();
            let x = law.sample(manifold, &here, &frame, &mut rng)?;
            let step = scaled(&x.comp, row.theta[k] * scale);
            let next = manifold.exp_unchecked(&here, &step);
            frame = frame
                .iter()
                .map(|f| {
                    let mut t = manifold.transport_along_unchecked(&here, &step, &f.comp);
                    t.base = next.clone();
                    t.comp = manifold.project_tangent(&next, &t.comp);
                    t
                })
                .collect();
            increments.push(x);
            points.push(next);
        }
        Ok(WalkPath {
            manifold: manifold.clone(),
            law: law.clone(),
            x0: x0.clone(),
            row: row.clone(),
            increments,
            points,
            support_radius: law.support_radius(),
            seed,
        })
    }

    /// Build a path from explicitly given increments (each based at the
    /// corresponding S_{k-1}); used by tests and by enumeration oracles.
    pub fn from_increments(
        manifold: &ManifoldModel,
        law: &IncrementLaw,
        row: &WeightRow,
        x0: &Point,
        increments: Vec<Tangent>,
    ) -> Result<WalkPath> {
        if increments.len() != row.n {
            return Err(GeoError::Config(format!(
                "need {} increments, got {}",
                row.n,
                increments.len()
            )));
        }
        let n = row.n;
        let scale = 1.0 / (n as f64).sqrt();
        let mut points = Vec::with_capacity(n + 1);
        points.push(x0.clone());
        for (k, x) in increments.iter().enumerate() {
            let step = scaled(&x.comp, row.theta[k] * scale);
            let next = manifold.exp_unchecked(&points[k], &step);
            points.push(next);
        }
        Ok(WalkPath {
            manifold: manifold.clone(),
            law: law.clone(),
            x0: x0.clone(),
            row: row.clone(),
            increments,
            points,
            support_radius: law.support_radius(),
            seed: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.row.n
    }

    /// Largest violation of d(S_k, x0) <= r sqrt(k) / sqrt(n) over the path
    /// (negative when the bound holds strictly).
    pub fn max_lemma_slack(&self) -> f64 {
        let n = self.n() as f64;
        let r = self.support_radius;
        self.points
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, p)| self.manifold.distance(&self.x0, p) - r * (k as f64 / n).sqrt())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest violation of the per-piece bound d(S_{n_i}, S_{n_i + k}) <= r/sqrt(m)
    /// for 1 <= k <= floor(n/m).
    pub fn max_piece_slack(&self, part: &Partition) -> f64 {
        let r = self.support_radius;
        let bound = r / (part.m as f64).sqrt();
        let mut worst = f64::NEG_INFINITY;
        for i in 0..part.m {
            let start = part.cuts[i];
            let anchor = &self.points[start];
            let kmax = part.piece_len.min(self.n() - start);
            for k in 1..=kmax {
                let d = self.manifold.distance(anchor, &self.points[start + k]);
                worst = worst.max(d - bound);
            }
        }
        worst
    }

    /// Minimal-length pullbacks per piece: element [i][k] is the tangent vector
    /// at S_{n_i} that exp maps to S_{n_i + k} (k = 0 gives the zero vector).
    pub fn tangent_pullbacks(&self, part: &Partition) -> Result<Vec<Vec<Tangent>>> {
        let mut out = Vec::with_capacity(part.m);
        for i in 0..part.m {
            let start = part.cuts[i];
            let end = part.cuts[i + 1];
            let anchor = &self.points[start];
            let mut piece = Vec::with_capacity(end - start + 1);
            for k in 0..=(end - start) {
                piece.push(self.manifold.log_min(anchor, &self.points[start + k]).map_err(
                    |e| GeoError::Contract(format!("pullback inside a valid partition failed: {e}")),
                )?);
            }
            out.push(piece);
        }
        Ok(out)
    }

    /// Waypoints x0 = S_{n_0}, S_{n_1}, ..., S_{n_i} of the chained transport
    /// tau_RW,i : T_{x0}M -> T_{S_{n_i}}M.
    pub fn tau_rw_waypoints(&self, part: &Partition, i: usize) -> Vec<Point> {
        part.cuts[..=i].iter().map(|&c| self.points[c].clone()).collect()
    }

    /// Apply tau_RW,i to a vector at x0.
    pub fn tau_rw(&self, part: &Partition, i: usize, v: &Tangent) -> Result<Tangent> {
        self.manifold
            .transport_chain(&self.tau_rw_waypoints(part, i), v)
            .map_err(|e| GeoError::Contract(format!("tau_RW inside a valid partition failed: {e}")))
    }

    /// Apply the inverse of tau_RW,i to a vector at S_{n_i}.
    pub fn tau_rw_inverse(&self, part: &Partition, i: usize, v: &Tangent) -> Result<Tangent> {
        self.manifold
            .transport_chain_inverse(&self.tau_rw_waypoints(part, i), v)
            .map_err(|e| GeoError::Contract(format!("tau_RW inside a valid partition failed: {e}")))
    }

    /// Piece sums of the upper-bound construction:
    ///
    /// ```text
    /// Y_i = tau_RW,{i-1}^{-1} sum_{k=n_{i-1}+1}^{n_i} theta_k tau_{S_{n_{i-1}} S_{k-1}}^{-1} X_k,
    /// ```
    ///
    /// all based at x0. The sums are unnormalized; callers apply 1/sqrt(n).
    pub fn piece_sums_upper(&self, part: &Partition) -> Result<Vec<Tangent>> {
        let mut out = Vec::with_capacity(part.m);
        for i in 1..=part.m {
            let sum = self.inner_piece_sum(part, i)?;
            out.push(self.tau_rw_inverse(part, i - 1, &sum)?);
        }
        Ok(out)
    }

    /// Piece sums of the lower-bound construction: the inner sums are carried
    /// to x0 through the geodesic gamma_v(t) = exp(x0, t v) instead of through
    /// the walk's cut points:
    ///
    /// ```text
    /// Ybar_i = tau_{gamma_v; x0 gamma_v((i-1)/m)}^{-1}
    ///          tau_{gamma_v((i-1)/m) S_{n_{i-1}}}^{-1} (inner sum_i).
    /// ```
    pub fn piece_sums_lower(&self, part: &Partition, v: &Tangent) -> Result<Vec<Tangent>> {
        let mut out = Vec::with_capacity(part.m);
        for i in 1..=part.m {
            let sum = self.inner_piece_sum(part, i)?;
            out.push(self.carry_to_base_along_ray(part, v, i, &sum)?);
        }
        Ok(out)
    }

    /// The transported pullback pieces of the lower-bound construction;
    /// feeding them to [`reconstruct_lower`] reproduces S_n.
    pub fn lower_pullback_pieces(&self, part: &Partition, v: &Tangent) -> Result<Vec<Tangent>> {
        let mut out = Vec::with_capacity(part.m);
        for i in 1..=part.m {
            let anchor = &self.points[part.cuts[i - 1]];
            let pulled = self
                .manifold
                .log_min(anchor, &self.points[part.cuts[i]])
                .map_err(|e| GeoError::Contract(format!("pullback failed: {e}")))?;
            out.push(self.carry_to_base_along_ray(part, v, i, &pulled)?);
        }
        Ok(out)
    }

    /// sum_{k=n_{i-1}+1}^{n_i} theta_k tau^{-1}_{S_{n_{i-1}} S_{k-1}} X_k at S_{n_{i-1}}.
    fn inner_piece_sum(&self, part: &Partition, i: usize) -> Result<Tangent> {
        let m = &self.manifold;
        let anchor = &self.points[part.cuts[i - 1]];
        let mut comp = vec![0.0; m.ambient_len()];
        for k in (part.cuts[i - 1] + 1)..=part.cuts[i] {
            let pulled = m.transport(&self.points[k - 1], anchor, &self.increments[k - 1]).map_err(
                |e| GeoError::Contract(format!("in-piece transport failed at step {k}: {e}")),
            )?;
            comp = add_scaled(&comp, &pulled.comp, self.row.theta[k - 1]);
        }
        Ok(Tangent { base: anchor.clone(), comp })
    }

    /// Transport a vector at S_{n_{i-1}} to x0 via gamma_v((i-1)/m): first the
    /// minimizing geodesic to the ray point, then backwards along the ray.
    fn carry_to_base_along_ray(
        &self,
        part: &Partition,
        v: &Tangent,
        i: usize,
        at_anchor: &Tangent,
    ) -> Result<Tangent> {
        let m = &self.manifold;
        let t = (i - 1) as f64 / part.m as f64;
        let ray_dir = Tangent { base: self.x0.clone(), comp: scaled(&v.comp, t) };
        let ray_point = m.exp_unchecked(&self.x0, &ray_dir.comp);
        let at_ray = m.transport(&at_anchor.base, &ray_point, at_anchor)?;
        m.transport_along_inverse(&self.x0, &ray_dir, &at_ray)
    }

    /// Tangent discrepancy at step l:
    ///
    /// ```text
    /// | log_min(x0, S_l) - (1/sqrt n) sum_{k<=l} theta_k tau_{x0 S_{k-1}}^{-1} X_k |.
    /// ```
    pub fn tangent_discrepancy(&self, l: usize) -> Result<f64> {
        Ok(self.tangent_discrepancy_profile(&[l])?[0])
    }

    /// Discrepancies at several steps in one pass over the path.
    pub fn tangent_discrepancy_profile(&self, ls: &[usize]) -> Result<Vec<f64>> {
        let m = &self.manifold;
        let n = self.n();
        let iota = m.injectivity_radius();
        let lmax = ls.iter().copied().max().unwrap_or(0);
        if lmax > n {
            return Err(GeoError::Config(format!("discrepancy step {lmax} exceeds n = {n}")));
        }
        let scale = 1.0 / (n as f64).sqrt();
        let mut sum = vec![0.0; m.ambient_len()];
        let mut out = vec![0.0; ls.len()];
        for l in 1..=lmax {
            let prev = &self.points[l - 1];
            if m.distance(&self.x0, prev) >= iota {
                return Err(GeoError::CutLocus(format!(
                    "walk left the injectivity ball before step {l}"
                )));
            }
            let pulled = m.transport(prev, &self.x0, &self.increments[l - 1])?;
            sum = add_scaled(&sum, &pulled.comp, self.row.theta[l - 1]);
            for (slot, &want) in out.iter_mut().zip(ls) {
                if want == l {
                    let log = m.log_min(&self.x0, &self.points[l])?;
                    let diff = add_scaled(&log.comp, &sum, -scale);
                    let t = Tangent { base: self.x0.clone(), comp: diff };
                    *slot = m.norm(&t);
                }
            }
        }
        Ok(out)
    }

    // -----------------------------------------------------------------------
    // Serialization
    // -----------------------------------------------------------------------

    /// Columnar CSV: step, point coordinates, increment components, weight.
    /// Step 0 carries the start point and empty increment/weight fields.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        let a = self.manifold.ambient_len();
        write!(w, "step")?;
        for j in 0..a {
            write!(w, ",p{j}")?;
        }
        for j in 0..a {
            write!(w, ",x{j}")?;
        }
        writeln!(w, ",theta")?;
        for (k, p) in self.points.iter().enumerate() {
            write!(w, "{k}")?;
            for c in &p.coords {
                write!(w, ",{}", crate::format_sig12(*c))?;
            }
            if k == 0 {
                for _ in 0..a {
                    write!(w, ",")?;
                }
                writeln!(w, ",")?;
            } else {
                for c in &self.increments[k - 1].comp {
                    write!(w, ",{}", crate::format_sig12(*c))?;
                }
                writeln!(w, ",{}", crate::format_sig12(self.row.theta[k - 1]))?;
            }
        }
        Ok(())
    }

    pub fn manifest(&self) -> WalkManifest {
        WalkManifest {
            manifold: self.manifold.clone(),
            law: self.law.clone(),
            n: self.n(),
            x0: self.x0.coords.clone(),
            seed: self.seed,
            row_seed: self.row.seed,
            support_radius: self.support_radius,
        }
    }
}

/// JSON manifest emitted next to a path CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WalkManifest {
    pub manifold: ManifoldModel,
    pub law: IncrementLaw,
    pub n: usize,
    pub x0: Vec<f64>,
    pub seed: u64,
    pub row_seed: u64,
    pub support_radius: f64,
}

/// The piecewise-geodesic endpoint map of the upper-bound construction: each
/// v_{i+1} is parallel transported along the path built so far and followed
/// for time 1/m.
pub fn reconstruct_upper(m: &ManifoldModel, x0: &Point, vs: &[Tangent]) -> Result<Point> {
    let pieces = vs.len();
    if pieces == 0 {
        return Ok(x0.clone());
    }
    let coords: Vec<Vec<f64>> = {
        let frame0 = m.orthonormal_frame(x0);
        vs.iter()
            .map(|v| {
                m.tangent(x0, v.comp.clone()).map(|t| m.frame_coords(&frame0, &t))
            })
            .collect::<Result<_>>()?
    };
    let mut cur = x0.clone();
    let mut frame = m.orthonormal_frame(x0);
    for c in &coords {
        let transported = m.from_frame_coords(&frame, c);
        let step = scaled(&transported.comp, 1.0 / pieces as f64);
        let next = m.exp_unchecked(&cur, &step);
        frame = frame
            .iter()
            .map(|f| {
                let mut t = m.transport_along_unchecked(&cur, &step, &f.comp);
                t.base = next.clone();
                t.comp = m.project_tangent(&next, &t.comp);
                t
            })
            .collect();
        cur = next;
    }
    Ok(cur)
}

/// The endpoint map of the lower-bound construction: vectors are transported
/// along the reference geodesic gamma_v as far as possible, then across to the
/// constructed path:
///
/// ```text
/// y_0 = x0,   y_k = exp(y_{k-1}, tau_{x_{k-1} y_{k-1}} tau_{gamma_v; x0 x_{k-1}} v_k),
/// ```
///
/// with x_i = gamma_v(i/m). Applied to the transported pullback pieces of a
/// simulated path this reproduces the path's endpoint.
pub fn reconstruct_lower(
    m: &ManifoldModel,
    x0: &Point,
    v: &Tangent,
    vs: &[Tangent],
) -> Result<Point> {
    let pieces = vs.len();
    let mut y = x0.clone();
    for (k, vk) in vs.iter().enumerate() {
        let t = k as f64 / pieces as f64;
        let ray_dir = Tangent { base: x0.clone(), comp: scaled(&v.comp, t) };
        let ray_point = m.exp_unchecked(x0, &ray_dir.comp);
        let vk_based = Tangent { base: x0.clone(), comp: vk.comp.clone() };
        let at_ray = m.transport_along(x0, &ray_dir, &vk_based)?;
        let at_y = m.transport(&ray_point, &y, &at_ray).map_err(|e| {
            GeoError::CutLocus(format!("reconstruction step {} hit the cut locus: {e}", k + 1))
        })?;
        y = m.exp_unchecked(&y, &at_y.comp);
    }
    Ok(y)
}
