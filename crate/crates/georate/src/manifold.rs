//! Closed-form geometry kernel for the three model spaces.
//!
//! All three manifolds are represented extrinsically:
//!
//! - `Euclidean(d)` — points are vectors in R^d, geodesics are straight lines.
//! - `Sphere(d, R)` — the radius-R sphere embedded in R^(d+1); geodesics are
//!   great circles, the exponential map is the cos/sin rotation formula.
//! - `Hyperbolic(d)` — the upper hyperboloid `<x,x>_M = -1`, `x_d > 0` in
//!   (d+1)-dimensional Minkowski space (last coordinate timelike, curvature -1);
//!   geodesics follow the cosh/sinh formulas.
//!
//! Points are renormalized onto the manifold after every operation so that
//! representation drift stays far below the 1e-10 representation tolerance.
//! Parallel transport is available along minimizing geodesics ([`ManifoldModel::transport`]),
//! along an explicitly given geodesic ([`ManifoldModel::transport_along`], needed when the
//! transport curve is longer than the injectivity radius), and chained through
//! waypoint lists ([`ManifoldModel::transport_chain`]).

use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};

/// Tolerance used to detect antipodal (cut-locus) configurations on the sphere.
const CUT_LOCUS_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Ambient-vector helpers
// ---------------------------------------------------------------------------

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minkowski inner product with the last coordinate timelike.
pub(crate) fn minkowski_dot(a: &[f64], b: &[f64]) -> f64 {
    let d = a.len() - 1;
    dot(&a[..d], &b[..d]) - a[d] * b[d]
}

pub(crate) fn euclidean_norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn scaled(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub(crate) fn add_scaled(a: &[f64], b: &[f64], s: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Angle between x and y on the radius-R sphere, together with the normalized
/// cosine and the tangential component w = y - cos(theta) x (of Euclidean norm
/// R sin(theta)). atan2 keeps the angle accurate for nearby and near-antipodal
/// points alike.
fn sphere_angle(x: &[f64], y: &[f64], radius: f64) -> (f64, f64, Vec<f64>) {
    let c = (dot(x, y) / (radius * radius)).clamp(-1.0, 1.0);
    let w = add_scaled(y, x, -c);
    let s = euclidean_norm(&w) / radius;
    (s.atan2(c), c, w)
}

/// Hyperbolic analogue: distance, cosh of it, and w = y + <x,y>_M x with
/// Minkowski norm sinh(theta).
fn hyperbolic_angle(x: &[f64], y: &[f64]) -> (f64, f64, Vec<f64>) {
    let c = (-minkowski_dot(x, y)).max(1.0);
    let w = add_scaled(y, x, -c);
    let s = minkowski_dot(&w, &w).max(0.0).sqrt();
    (s.asinh(), c, w)
}

// ---------------------------------------------------------------------------
// Core types
// ---------------------------------------------------------------------------

/// One of the three constant-curvature model spaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ManifoldModel {
    Euclidean { dim: usize },
    Sphere { dim: usize, radius: f64 },
    Hyperbolic { dim: usize },
}

/// A point on a manifold, stored in ambient coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub coords: Vec<f64>,
}

/// A tangent vector attached to a base point, stored as an ambient vector
/// constrained to the tangent hyperplane at the base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tangent {
    pub base: Point,
    pub comp: Vec<f64>,
}

/// One element of an exponential-map preimage set returned by [`ManifoldModel::log_all`].
///
/// `degenerate` marks lengths at which every direction is a valid preimage
/// (self or antipodal preimages on the sphere); the stored vector is then one
/// representative of the continuum.
#[derive(Debug, Clone)]
pub struct Preimage {
    pub vector: Tangent,
    pub degenerate: bool,
}

impl ManifoldModel {
    pub fn euclidean(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(GeoError::Config("manifold dimension must be >= 1".into()));
        }
        Ok(ManifoldModel::Euclidean { dim })
    }

    pub fn sphere(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(GeoError::Config("manifold dimension must be >= 1".into()));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(GeoError::Config(format!("sphere radius must be positive, got {radius}")));
        }
        Ok(ManifoldModel::Sphere { dim, radius })
    }

    pub fn hyperbolic(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(GeoError::Config("manifold dimension must be >= 1".into()));
        }
        Ok(ManifoldModel::Hyperbolic { dim })
    }

    /// Intrinsic dimension d.
    pub fn dim(&self) -> usize {
        match *self {
            ManifoldModel::Euclidean { dim } => dim,
            ManifoldModel::Sphere { dim, .. } => dim,
            ManifoldModel::Hyperbolic { dim } => dim,
        }
    }

    /// Length of the ambient coordinate vectors (d, or d+1 for embedded models).
    pub fn ambient_len(&self) -> usize {
        match *self {
            ManifoldModel::Euclidean { dim } => dim,
            ManifoldModel::Sphere { dim, .. } => dim + 1,
            ManifoldModel::Hyperbolic { dim } => dim + 1,
        }
    }

    /// A canonical base point: the origin, the "north pole" (0,...,0,R), or the
    /// hyperboloid apex (0,...,0,1).
    pub fn base_point(&self) -> Point {
        let n = self.ambient_len();
        let mut coords = vec![0.0; n];
        match *self {
            ManifoldModel::Euclidean { .. } => {}
            ManifoldModel::Sphere { radius, .. } => coords[n - 1] = radius,
            ManifoldModel::Hyperbolic { .. } => coords[n - 1] = 1.0,
        }
        Point { coords }
    }

    /// Injectivity radius, constant over each model space: pi*R on the sphere,
    /// +infinity on the flat and hyperbolic models.
    pub fn injectivity_radius(&self) -> f64 {
        match *self {
            ManifoldModel::Sphere { radius, .. } => std::f64::consts::PI * radius,
            _ => f64::INFINITY,
        }
    }

    /// Ambient inner product of the tangent hyperplane (Euclidean dot, or the
    /// Minkowski form on the hyperboloid, which is positive definite there).
    fn ambient_metric(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            ManifoldModel::Hyperbolic { .. } => minkowski_dot(a, b),
            _ => dot(a, b),
        }
    }

    /// Pull a nearly-on-manifold coordinate vector back onto the manifold.
    pub fn project_point(&self, coords: Vec<f64>) -> Point {
        match *self {
            ManifoldModel::Euclidean { .. } => Point { coords },
            ManifoldModel::Sphere { radius, .. } => {
                let n = euclidean_norm(&coords);
                Point { coords: scaled(&coords, radius / n) }
            }
            ManifoldModel::Hyperbolic { .. } => {
                let q = -minkowski_dot(&coords, &coords);
                Point { coords: scaled(&coords, 1.0 / q.sqrt()) }
            }
        }
    }

    /// Project an ambient vector onto the tangent hyperplane at `base`.
    pub fn project_tangent(&self, base: &Point, v: &[f64]) -> Vec<f64> {
        match *self {
            ManifoldModel::Euclidean { .. } => v.to_vec(),
            ManifoldModel::Sphere { radius, .. } => {
                let c = dot(v, &base.coords) / (radius * radius);
                add_scaled(v, &base.coords, -c)
            }
            ManifoldModel::Hyperbolic { .. } => {
                // <x,x>_M = -1, so the tangent projection is v + <v,x>_M x.
                let c = minkowski_dot(v, &base.coords);
                add_scaled(v, &base.coords, c)
            }
        }
    }

    /// Validate user-supplied coordinates and snap them onto the manifold.
    pub fn point(&self, coords: Vec<f64>) -> Result<Point> {
        if coords.len() != self.ambient_len() {
            return Err(GeoError::Config(format!(
                "point needs {} ambient coordinates, got {}",
                self.ambient_len(),
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(GeoError::Config("point coordinates must be finite".into()));
        }
        match *self {
            ManifoldModel::Euclidean { .. } => Ok(Point { coords }),
            ManifoldModel::Sphere { radius, .. } => {
                let n = euclidean_norm(&coords);
                if (n - radius).abs() > 1e-6 * radius.max(1.0) {
                    return Err(GeoError::Config(format!(
                        "|coords| = {n} is not on the radius-{radius} sphere"
                    )));
                }
                Ok(self.project_point(coords))
            }
            ManifoldModel::Hyperbolic { .. } => {
                let q = minkowski_dot(&coords, &coords);
                let last = *coords.last().unwrap();
                if (q + 1.0).abs() > 1e-6 || last <= 0.0 {
                    return Err(GeoError::Config(format!(
                        "coords with <x,x>_M = {q}, x_d = {last} are not on the hyperboloid"
                    )));
                }
                Ok(self.project_point(coords))
            }
        }
    }

    /// Validate a user-supplied tangent vector and project it exactly onto the
    /// tangent hyperplane at `base`.
    pub fn tangent(&self, base: &Point, comp: Vec<f64>) -> Result<Tangent> {
        if comp.len() != self.ambient_len() {
            return Err(GeoError::Config(format!(
                "tangent needs {} ambient components, got {}",
                self.ambient_len(),
                comp.len()
            )));
        }
        let proj = self.project_tangent(base, &comp);
        let drift = sub(&comp, &proj).iter().map(|x| x.abs()).fold(0.0, f64::max);
        if drift > 1e-6 * (1.0 + euclidean_norm(&comp)) {
            return Err(GeoError::Config(format!(
                "components are not tangent at the base point (normal part {drift:.3e})"
            )));
        }
        Ok(Tangent { base: base.clone(), comp: proj })
    }

    pub fn zero_tangent(&self, base: &Point) -> Tangent {
        Tangent { base: base.clone(), comp: vec![0.0; self.ambient_len()] }
    }

    /// Riemannian inner product of two tangent vectors at the same base point.
    pub fn inner(&self, u: &Tangent, v: &Tangent) -> Result<f64> {
        self.check_same_base(&u.base, &v.base)?;
        Ok(self.ambient_metric(&u.comp, &v.comp))
    }

    /// Riemannian norm of a tangent vector.
    pub fn norm(&self, v: &Tangent) -> f64 {
        self.ambient_metric(&v.comp, &v.comp).max(0.0).sqrt()
    }

    fn check_same_base(&self, a: &Point, b: &Point) -> Result<()> {
        let diff = sub(&a.coords, &b.coords).iter().map(|x| x.abs()).fold(0.0, f64::max);
        if diff > 1e-9 {
            return Err(GeoError::Contract(format!(
                "base points differ by {diff:.3e} (expected identical)"
            )));
        }
        Ok(())
    }

    // -----------------------------------------------------------------------
    // Exponential map, logarithm, distance
    // -----------------------------------------------------------------------

    /// Riemannian exponential map: the time-1 point of the geodesic from `x`
    /// with initial velocity `v`.
    pub fn exp(&self, x: &Point, v: &Tangent) -> Result<Point> {
        self.check_same_base(&v.base, x)?;
        Ok(self.exp_unchecked(x, &v.comp))
    }

    pub(crate) fn exp_unchecked(&self, x: &Point, comp: &[f64]) -> Point {
        match *self {
            ManifoldModel::Euclidean { .. } => Point { coords: add_scaled(&x.coords, comp, 1.0) },
            ManifoldModel::Sphere { radius, .. } => {
                let speed = euclidean_norm(comp);
                if speed == 0.0 {
                    return x.clone();
                }
                let theta = speed / radius;
                // cos(t) x + sin(t) R u with u the unit direction of v
                let mut coords = scaled(&x.coords, theta.cos());
                coords = add_scaled(&coords, comp, theta.sin() * radius / speed);
                self.project_point(coords)
            }
            ManifoldModel::Hyperbolic { .. } => {
                let speed = minkowski_dot(comp, comp).max(0.0).sqrt();
                if speed == 0.0 {
                    return x.clone();
                }
                let mut coords = scaled(&x.coords, speed.cosh());
                coords = add_scaled(&coords, comp, speed.sinh() / speed);
                self.project_point(coords)
            }
        }
    }

    /// Riemannian distance. On the embedded models the angle is recovered with
    /// atan2/asinh instead of acos/acosh, which keeps full resolution for
    /// nearby points (acos floors at ~1.5e-8 next to 1).
    pub fn distance(&self, x: &Point, y: &Point) -> f64 {
        match *self {
            ManifoldModel::Euclidean { .. } => euclidean_norm(&sub(&y.coords, &x.coords)),
            ManifoldModel::Sphere { radius, .. } => {
                let (theta, _, _) = sphere_angle(&x.coords, &y.coords, radius);
                radius * theta
            }
            ManifoldModel::Hyperbolic { .. } => {
                let (theta, _, _) = hyperbolic_angle(&x.coords, &y.coords);
                theta
            }
        }
    }

    /// The unique minimal-length `v` with `exp(x, v) = y`.
    ///
    /// Errors with [`GeoError::CutLocus`] for antipodal sphere points, where the
    /// minimizer is not unique.
    pub fn log_min(&self, x: &Point, y: &Point) -> Result<Tangent> {
        match *self {
            ManifoldModel::Euclidean { .. } => {
                Ok(Tangent { base: x.clone(), comp: sub(&y.coords, &x.coords) })
            }
            ManifoldModel::Sphere { radius, .. } => {
                let (theta, c, w) = sphere_angle(&x.coords, &y.coords, radius);
                if c <= -1.0 + CUT_LOCUS_TOL {
                    return Err(GeoError::CutLocus(
                        "log is not unique for antipodal sphere points".into(),
                    ));
                }
                let nw = euclidean_norm(&w);
                if nw == 0.0 {
                    return Ok(self.zero_tangent(x));
                }
                // w points along the geodesic with |w| = R sin(theta)
                Ok(Tangent { base: x.clone(), comp: scaled(&w, radius * theta / nw) })
            }
            ManifoldModel::Hyperbolic { .. } => {
                let (theta, _, w) = hyperbolic_angle(&x.coords, &y.coords);
                let nw = minkowski_dot(&w, &w).max(0.0).sqrt();
                if nw == 0.0 {
                    return Ok(self.zero_tangent(x));
                }
                Ok(Tangent { base: x.clone(), comp: scaled(&w, theta / nw) })
            }
        }
    }

    /// All `v` with `exp(x, v) = y` and `|v| <= bound`, sorted by length.
    ///
    /// On the flat and hyperbolic models the exponential map is a global
    /// diffeomorphism, so the set is `{log_min}` (if within the bound). On the
    /// sphere the preimage lengths are enumerated arithmetically: with
    /// `delta = distance(x, y)` and `u` the unit minimal direction, the
    /// solutions are `(delta + 2*pi*R*j) u` and `-((2*pi*R - delta) + 2*pi*R*j) u`
    /// for `j >= 0`. Self and antipodal preimages of positive length admit every
    /// direction; one representative per length is returned with the
    /// `degenerate` flag set.
    pub fn log_all(&self, x: &Point, y: &Point, bound: f64) -> Result<Vec<Preimage>> {
        if !(bound >= 0.0) {
            return Err(GeoError::Config(format!("log_all bound must be >= 0, got {bound}")));
        }
        match *self {
            ManifoldModel::Euclidean { .. } | ManifoldModel::Hyperbolic { .. } => {
                let v = self.log_min(x, y)?;
                if self.norm(&v) <= bound {
                    Ok(vec![Preimage { vector: v, degenerate: false }])
                } else {
                    Ok(vec![])
                }
            }
            ManifoldModel::Sphere { radius, .. } => {
                let circumference = 2.0 * std::f64::consts::PI * radius;
                let (theta, c, _) = sphere_angle(&x.coords, &y.coords, radius);
                let mut out: Vec<Preimage> = Vec::new();

                if theta <= 1e-12 {
                    // y = x: the zero vector, plus full loops in any direction.
                    out.push(Preimage { vector: self.zero_tangent(x), degenerate: false });
                    let dir = &self.orthonormal_frame(x)[0];
                    let mut len = circumference;
                    while len <= bound {
                        out.push(Preimage {
                            vector: Tangent { base: x.clone(), comp: scaled(&dir.comp, len) },
                            degenerate: true,
                        });
                        len += circumference;
                    }
                    return Ok(out);
                }
                if c <= -1.0 + CUT_LOCUS_TOL {
                    // Antipodal: every direction with length pi*R (2j+1) solves.
                    let dir = &self.orthonormal_frame(x)[0];
                    let mut len = 0.5 * circumference;
                    while len <= bound {
                        out.push(Preimage {
                            vector: Tangent { base: x.clone(), comp: scaled(&dir.comp, len) },
                            degenerate: true,
                        });
                        len += circumference;
                    }
                    return Ok(out);
                }

                let min = self.log_min(x, y)?;
                let delta = self.norm(&min);
                let u = scaled(&min.comp, 1.0 / delta);
                let mut lengths: Vec<(f64, f64)> = Vec::new(); // (|v|, sign)
                let mut len = delta;
                while len <= bound {
                    lengths.push((len, 1.0));
                    len += circumference;
                }
                len = circumference - delta;
                while len <= bound {
                    lengths.push((len, -1.0));
                    len += circumference;
                }
                lengths.sort_by(|a, b| a.0.total_cmp(&b.0));
                for (l, sign) in lengths {
                    out.push(Preimage {
                        vector: Tangent { base: x.clone(), comp: scaled(&u, sign * l) },
                        degenerate: false,
                    });
                }
                Ok(out)
            }
        }
    }

    // -----------------------------------------------------------------------
    // Parallel transport
    // -----------------------------------------------------------------------

    /// Parallel transport of `v` along the geodesic `t -> exp(x, t*dir)` from
    /// `x` to `exp(x, dir)`. Valid for any geodesic length (the segment need
    /// not be minimizing).
    pub fn transport_along(&self, x: &Point, dir: &Tangent, v: &Tangent) -> Result<Tangent> {
        self.check_same_base(&dir.base, x)?;
        self.check_same_base(&v.base, x)?;
        Ok(self.transport_along_unchecked(x, &dir.comp, &v.comp))
    }

    pub(crate) fn transport_along_unchecked(&self, x: &Point, dir: &[f64], v: &[f64]) -> Tangent {
        let end = self.exp_unchecked(x, dir);
        match *self {
            ManifoldModel::Euclidean { .. } => Tangent { base: end, comp: v.to_vec() },
            ManifoldModel::Sphere { radius, .. } => {
                let speed = euclidean_norm(dir);
                if speed == 0.0 {
                    return Tangent { base: end, comp: v.to_vec() };
                }
                let theta = speed / radius;
                let u = scaled(dir, 1.0 / speed);
                // The normal component is fixed; the along-geodesic component
                // rotates with the velocity: u -> cos(theta) u - sin(theta) x/R.
                let a = dot(v, &u);
                let mut comp = add_scaled(v, &u, a * (theta.cos() - 1.0));
                comp = add_scaled(&comp, &x.coords, -a * theta.sin() / radius);
                let proj = self.project_tangent(&end, &comp);
                Tangent { base: end, comp: proj }
            }
            ManifoldModel::Hyperbolic { .. } => {
                let speed = minkowski_dot(dir, dir).max(0.0).sqrt();
                if speed == 0.0 {
                    return Tangent { base: end, comp: v.to_vec() };
                }
                let u = scaled(dir, 1.0 / speed);
                // u -> cosh(s) u + sinh(s) x, normal component fixed.
                let a = minkowski_dot(v, &u);
                let mut comp = add_scaled(v, &u, a * (speed.cosh() - 1.0));
                comp = add_scaled(&comp, &x.coords, a * speed.sinh());
                let proj = self.project_tangent(&end, &comp);
                Tangent { base: end, comp: proj }
            }
        }
    }

    /// Inverse of [`ManifoldModel::transport_along`]: transports a vector based at
    /// `exp(x, dir)` back to `x` along the same geodesic.
    pub fn transport_along_inverse(&self, x: &Point, dir: &Tangent, v: &Tangent) -> Result<Tangent> {
        self.check_same_base(&dir.base, x)?;
        let end = self.exp_unchecked(x, &dir.comp);
        self.check_same_base(&v.base, &end)?;
        // Transport along the reversed geodesic, whose initial velocity at the
        // endpoint is minus the transported velocity.
        let arrived = self.transport_along_unchecked(x, &dir.comp, &dir.comp);
        let back = Tangent { base: arrived.base.clone(), comp: scaled(&arrived.comp, -1.0) };
        let mut result = self.transport_along_unchecked(&end, &back.comp, &v.comp);
        result.base = x.clone();
        result.comp = self.project_tangent(x, &result.comp);
        Ok(result)
    }

    /// Parallel transport along the unique minimizing geodesic from `x` to `y`.
    pub fn transport(&self, x: &Point, y: &Point, v: &Tangent) -> Result<Tangent> {
        self.check_same_base(&v.base, x)?;
        let dir = self.log_min(x, y)?;
        let mut t = self.transport_along_unchecked(x, &dir.comp, &v.comp);
        // Snap the endpoint to y exactly: exp(x, log(x,y)) = y up to rounding.
        t.base = y.clone();
        t.comp = self.project_tangent(y, &t.comp);
        Ok(t)
    }

    /// Composition of per-segment minimizing transports along a waypoint list,
    /// applied left to right. A single waypoint is the empty composition.
    pub fn transport_chain(&self, waypoints: &[Point], v: &Tangent) -> Result<Tangent> {
        if waypoints.is_empty() {
            return Err(GeoError::Config("transport_chain needs at least one waypoint".into()));
        }
        self.check_same_base(&v.base, &waypoints[0])?;
        let mut cur = v.clone();
        for pair in waypoints.windows(2) {
            cur = self.transport(&pair[0], &pair[1], &cur)?;
        }
        Ok(cur)
    }

    /// Inverse of [`ManifoldModel::transport_chain`]: applies the inverse segment
    /// transports right to left, mapping a vector at the last waypoint back to
    /// the first.
    pub fn transport_chain_inverse(&self, waypoints: &[Point], v: &Tangent) -> Result<Tangent> {
        if waypoints.is_empty() {
            return Err(GeoError::Config("transport_chain needs at least one waypoint".into()));
        }
        self.check_same_base(&v.base, waypoints.last().unwrap())?;
        let mut cur = v.clone();
        for pair in waypoints.windows(2).rev() {
            cur = self.transport(&pair[1], &pair[0], &cur)?;
        }
        Ok(cur)
    }

    // -----------------------------------------------------------------------
    // Frames
    // -----------------------------------------------------------------------

    /// A deterministic orthonormal basis of the tangent space at `x`, built by
    /// Gram-Schmidt on the ambient coordinate basis.
    pub fn orthonormal_frame(&self, x: &Point) -> Vec<Tangent> {
        let d = self.dim();
        let n = self.ambient_len();
        let mut frame: Vec<Tangent> = Vec::with_capacity(d);
        for i in 0..n {
            if frame.len() == d {
                break;
            }
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            let mut w = self.project_tangent(x, &e);
            for f in &frame {
                let c = self.ambient_metric(&w, &f.comp);
                w = add_scaled(&w, &f.comp, -c);
            }
            let nw = self.ambient_metric(&w, &w).max(0.0).sqrt();
            if nw > 1e-8 {
                frame.push(Tangent { base: x.clone(), comp: scaled(&w, 1.0 / nw) });
            }
        }
        debug_assert_eq!(frame.len(), d);
        frame
    }

    /// Coordinates of a tangent vector in an orthonormal frame at the same base.
    pub fn frame_coords(&self, frame: &[Tangent], v: &Tangent) -> Vec<f64> {
        frame.iter().map(|f| self.ambient_metric(&v.comp, &f.comp)).collect()
    }

    /// Rebuild a tangent vector from frame coordinates.
    pub fn from_frame_coords(&self, frame: &[Tangent], coords: &[f64]) -> Tangent {
        let base = frame[0].base.clone();
        let mut comp = vec![0.0; self.ambient_len()];
        for (c, f) in coords.iter().zip(frame) {
            comp = add_scaled(&comp, &f.comp, *c);
        }
        Tangent { base, comp }
    }
}
