//! Domains, directional boundary distance and outward normals.
//!
//! For an interior point `xi` and unit direction `w`, `rho(xi, w)` is the distance travelled
//! along `w` before leaving the domain. On convex domains the ray leaves exactly once; on the
//! non-convex [`MultiAnnulus`] the ray alternates between the domain and its complement, which
//! [`Domain::complement_intervals`] reports in full.

mod annulus;
mod implicit;
mod polytope;
mod quadric;
mod stadium;

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::vecops::{add_scaled, norm, sub};

pub use annulus::MultiAnnulus;
pub use implicit::{ImplicitDomain, Predicate};
pub use polytope::{Halfspace, Polytope};
pub use quadric::{Ball, Ellipsoid};
pub use stadium::Stadium;

/// A unit vector. Normalized on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitDirection(Vec<f64>);

impl UnitDirection {
    pub fn new(v: impl Into<Vec<f64>>) -> Result<Self> {
        let mut v = v.into();
        let len = norm(&v);
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::InvalidArgument("direction must be a finite nonzero vector".into()));
        }
        v.iter_mut().for_each(|x| *x /= len);
        Ok(UnitDirection(v))
    }

    /// Unit direction from `from` towards `to`.
    pub fn between(from: &[f64], to: &[f64]) -> Result<Self> {
        Self::new(sub(to, from))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }
}

impl AsRef<[f64]> for UnitDirection {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Where a ray from an interior point leaves a convex domain.
#[derive(Debug, Clone, PartialEq)]
pub struct RayExit {
    pub rho: f64,
    /// Outward unit normal at `xi + rho w`.
    pub normal: Vec<f64>,
}

/// Ordered, disjoint intervals `[c_j, d_j)` of ray parameters lying outside the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplementIntervals {
    intervals: Vec<(f64, f64)>,
}

impl ComplementIntervals {
    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// First exit distance; equals `rho` on convex domains.
    pub fn first_exit(&self) -> f64 {
        self.intervals.first().map_or(f64::INFINITY, |iv| iv.0)
    }

    pub fn contains(&self, t: f64) -> bool {
        self.intervals.iter().any(|&(c, d)| c <= t && t < d)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainMetrics {
    pub diameter: f64,
    pub bounding_center: Vec<f64>,
    pub bounding_radius: f64,
}

impl DomainMetrics {
    /// Lipschitz constant `diam / delta` of `rho(., w)` on points at least `delta` from the boundary.
    pub fn lipschitz_bound(&self, delta: f64) -> f64 {
        self.diameter / delta
    }
}

/// Per-node curvature data for the Hessian of `rho`.
pub(crate) enum NormalDerivative {
    /// Face normals are locally constant.
    Flat,
    /// Row-major `n x n` derivative of the normal field with respect to the boundary point.
    Matrix(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Ball(Ball),
    Ellipsoid(Ellipsoid),
    Polytope(Polytope),
    Stadium(Stadium),
    MultiAnnulus(MultiAnnulus),
    Implicit(ImplicitDomain),
}

fn check_point(p: &[f64], what: &str) -> Result<()> {
    if p.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidDomain(format!("{what} has non-finite coordinates")))
    }
}

fn check_positive(v: f64, what: &str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidDomain(format!("{what} must be positive and finite, got {v}")))
    }
}

impl Domain {
    pub fn ball(center: impl Into<Vec<f64>>, radius: f64) -> Result<Self> {
        let center = center.into();
        if center.len() < 2 {
            return Err(Error::UnsupportedDimension { dimension: center.len(), what: "ball" });
        }
        check_point(&center, "center")?;
        check_positive(radius, "radius")?;
        Ok(Domain::Ball(Ball { center, radius }))
    }

    pub fn ellipsoid(center: impl Into<Vec<f64>>, semi_axes: impl Into<Vec<f64>>) -> Result<Self> {
        let (center, semi_axes) = (center.into(), semi_axes.into());
        if center.len() < 2 {
            return Err(Error::UnsupportedDimension { dimension: center.len(), what: "ellipsoid" });
        }
        if semi_axes.len() != center.len() {
            return Err(Error::DimensionMismatch { expected: center.len(), got: semi_axes.len() });
        }
        check_point(&center, "center")?;
        for &a in &semi_axes {
            check_positive(a, "semi-axis")?;
        }
        Ok(Domain::Ellipsoid(Ellipsoid { center, semi_axes }))
    }

    pub fn polytope(halfspaces: Vec<Halfspace>) -> Result<Self> {
        Ok(Domain::Polytope(Polytope::new(halfspaces)?))
    }

    /// Axis-aligned box `lo < x < hi`.
    pub fn axis_box(lo: &[f64], hi: &[f64]) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), got: hi.len() });
        }
        let n = lo.len();
        let mut faces = Vec::with_capacity(2 * n);
        for k in 0..n {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            faces.push(Halfspace { normal: e.clone(), offset: hi[k] });
            e[k] = -1.0;
            faces.push(Halfspace { normal: e, offset: -lo[k] });
        }
        Self::polytope(faces)
    }

    /// Regular `k`-gon circumscribed by the circle of radius `circumradius`; the first vertex sits
    /// at angle `rotation`.
    pub fn regular_polygon(center: [f64; 2], circumradius: f64, k: usize, rotation: f64) -> Result<Self> {
        if k < 3 {
            return Err(Error::InvalidDomain("a polygon needs at least 3 sides".into()));
        }
        let apothem = circumradius * (std::f64::consts::PI / k as f64).cos();
        let faces = (0..k)
            .map(|i| {
                let phi = rotation + std::f64::consts::PI * (2 * i + 1) as f64 / k as f64;
                let a = vec![phi.cos(), phi.sin()];
                let offset = apothem + a[0] * center[0] + a[1] * center[1];
                Halfspace { normal: a, offset }
            })
            .collect();
        Self::polytope(faces)
    }

    pub fn stadium(p: [f64; 2], q: [f64; 2], radius: f64) -> Result<Self> {
        check_point(&p, "endpoint")?;
        check_point(&q, "endpoint")?;
        check_positive(radius, "radius")?;
        Ok(Domain::Stadium(Stadium { p, q, radius }))
    }

    pub fn multi_annulus(center: impl Into<Vec<f64>>, rings: Vec<(f64, f64)>) -> Result<Self> {
        let center = center.into();
        if center.len() < 2 {
            return Err(Error::UnsupportedDimension { dimension: center.len(), what: "multi-annulus" });
        }
        check_point(&center, "center")?;
        validate_rings(&rings)?;
        Ok(Domain::MultiAnnulus(MultiAnnulus { center, rings }))
    }

    /// Convex domain known only through `predicate`. `interior_point` must satisfy it and the
    /// domain must lie inside the given bounding ball.
    pub fn implicit(
        predicate: Predicate,
        interior_point: Vec<f64>,
        bounding_center: Vec<f64>,
        bounding_radius: f64,
    ) -> Result<Self> {
        let dimension = interior_point.len();
        if bounding_center.len() != dimension {
            return Err(Error::DimensionMismatch { expected: dimension, got: bounding_center.len() });
        }
        check_positive(bounding_radius, "bounding radius")?;
        if !predicate(&interior_point) {
            return Err(Error::EmptyInterior);
        }
        Ok(Domain::Implicit(ImplicitDomain { dimension, predicate, interior_point, bounding_center, bounding_radius }))
    }

    /// Convenience wrapper around [`Domain::implicit`] for plain closures.
    pub fn from_predicate<F>(
        predicate: F,
        interior_point: Vec<f64>,
        bounding_center: Vec<f64>,
        bounding_radius: f64,
    ) -> Result<Self>
    where
        F: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        Self::implicit(Arc::new(predicate), interior_point, bounding_center, bounding_radius)
    }

    pub fn dimension(&self) -> usize {
        match self {
            Domain::Ball(b) => b.center.len(),
            Domain::Ellipsoid(e) => e.center.len(),
            Domain::Polytope(p) => p.witness.len(),
            Domain::Stadium(_) => 2,
            Domain::MultiAnnulus(m) => m.center.len(),
            Domain::Implicit(d) => d.dimension,
        }
    }

    pub fn shape_name(&self) -> &'static str {
        match self {
            Domain::Ball(_) => "ball",
            Domain::Ellipsoid(_) => "ellipsoid",
            Domain::Polytope(_) => "polytope",
            Domain::Stadium(_) => "stadium",
            Domain::MultiAnnulus(_) => "multi_annulus",
            Domain::Implicit(_) => "implicit",
        }
    }

    pub fn is_convex(&self) -> bool {
        !matches!(self, Domain::MultiAnnulus(_))
    }

    /// Whether exact outward normals are available for the gradient formula.
    pub fn has_normals(&self) -> bool {
        !matches!(self, Domain::Implicit(_) | Domain::MultiAnnulus(_))
    }

    /// Membership in the open set; boundary points are excluded.
    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dimension() || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self {
            Domain::Ball(b) => b.contains(x),
            Domain::Ellipsoid(e) => e.contains(x),
            Domain::Polytope(p) => p.contains(x),
            Domain::Stadium(s) => s.contains(x),
            Domain::MultiAnnulus(m) => m.contains(x),
            Domain::Implicit(d) => d.contains(x),
        }
    }

    fn check_interior(&self, xi: &[f64], w: &[f64]) -> Result<()> {
        if w.len() != self.dimension() {
            return Err(Error::DimensionMismatch { expected: self.dimension(), got: w.len() });
        }
        if xi.len() != self.dimension() {
            return Err(Error::DimensionMismatch { expected: self.dimension(), got: xi.len() });
        }
        if !self.contains(xi) {
            return Err(Error::PointNotInterior);
        }
        Ok(())
    }

    /// Exit distance and outward normal of the ray `xi + t w` on a convex domain.
    pub fn ray_exit(&self, xi: &[f64], dir: &UnitDirection) -> Result<RayExit> {
        if !self.is_convex() {
            return Err(Error::NonConvexDomain);
        }
        self.check_interior(xi, dir.as_slice())?;
        let mut normal = vec![0.0; xi.len()];
        let rho = self.exit_unchecked(xi, dir.as_slice(), Some(&mut normal));
        Ok(RayExit { rho, normal })
    }

    /// `rho(xi, w)` on a convex domain; the first exit distance otherwise.
    pub fn rho(&self, xi: &[f64], dir: &UnitDirection) -> Result<f64> {
        self.check_interior(xi, dir.as_slice())?;
        if self.is_convex() {
            Ok(self.exit_unchecked(xi, dir.as_slice(), None))
        } else {
            Ok(self.complement_intervals(xi, dir)?.first_exit())
        }
    }

    pub fn complement_intervals(&self, xi: &[f64], dir: &UnitDirection) -> Result<ComplementIntervals> {
        self.check_interior(xi, dir.as_slice())?;
        let mut intervals = Vec::new();
        self.for_each_complement(xi, dir.as_slice(), |c, d| intervals.push((c, d)));
        Ok(ComplementIntervals { intervals })
    }

    /// Ray exit without validation. `xi` must be interior and `w` a unit vector of the right
    /// dimension; the domain must be convex.
    pub(crate) fn exit_unchecked(&self, xi: &[f64], w: &[f64], normal: Option<&mut [f64]>) -> f64 {
        match self {
            Domain::Ball(b) => b.exit(xi, w, normal),
            Domain::Ellipsoid(e) => e.exit(xi, w, normal),
            Domain::Polytope(p) => p.exit(xi, w, normal),
            Domain::Stadium(s) => s.exit(xi, w, normal),
            Domain::Implicit(d) => {
                let t = d.rho(xi, w);
                if let Some(nu) = normal {
                    d.fd_normal(xi, w, nu);
                }
                t
            }
            Domain::MultiAnnulus(m) => {
                let mut first = f64::INFINITY;
                m.for_each_complement(xi, w, |c, _| first = first.min(c));
                first
            }
        }
    }

    pub(crate) fn for_each_complement(&self, xi: &[f64], w: &[f64], mut visit: impl FnMut(f64, f64)) {
        match self {
            Domain::MultiAnnulus(m) => m.for_each_complement(xi, w, visit),
            _ => visit(self.exit_unchecked(xi, w, None), f64::INFINITY),
        }
    }

    /// Derivative of the normal field at boundary point `y` with normal `nu`, when the shape
    /// supports second derivatives of `rho`.
    pub(crate) fn normal_derivative(&self, y: &[f64], nu: &[f64]) -> Option<NormalDerivative> {
        match self {
            Domain::Ball(b) => Some(NormalDerivative::Matrix(b.normal_derivative(nu))),
            Domain::Ellipsoid(e) => Some(NormalDerivative::Matrix(e.normal_derivative(y, nu))),
            Domain::Polytope(_) => Some(NormalDerivative::Flat),
            _ => None,
        }
    }

    /// Euclidean distance to the boundary; zero outside the domain.
    ///
    /// Exact for every shape except [`Domain::Implicit`], where it is the smallest ray exit
    /// over a fixed direction set (an upper bound).
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        if !self.contains(x) {
            return 0.0;
        }
        match self {
            Domain::Ball(b) => b.boundary_distance(x),
            Domain::Ellipsoid(e) => e.boundary_distance(x),
            Domain::Polytope(p) => p.boundary_distance(x),
            Domain::Stadium(s) => s.boundary_distance(x),
            Domain::MultiAnnulus(m) => m.boundary_distance(x),
            Domain::Implicit(d) => {
                let dirs = crate::sphere_quadrature::probe_directions(d.dimension);
                dirs.chunks(d.dimension).map(|w| d.rho(x, w)).fold(f64::INFINITY, f64::min)
            }
        }
    }

    pub fn metrics(&self) -> DomainMetrics {
        let (bounding_center, bounding_radius) = self.bounding_ball();
        let diameter = match self {
            Domain::Ball(b) => 2.0 * b.radius,
            Domain::Ellipsoid(e) => 2.0 * e.semi_axes.iter().cloned().fold(0.0, f64::max),
            Domain::Polytope(p) => p.diameter(),
            Domain::Stadium(s) => s.diameter(),
            Domain::MultiAnnulus(m) => 2.0 * m.outer_radius(),
            Domain::Implicit(d) => d.diameter_bound(),
        };
        DomainMetrics { diameter, bounding_center, bounding_radius }
    }

    pub fn diameter(&self) -> f64 {
        self.metrics().diameter
    }

    /// A ball containing the domain.
    pub fn bounding_ball(&self) -> (Vec<f64>, f64) {
        match self {
            Domain::Ball(b) => (b.center.clone(), b.radius),
            Domain::Ellipsoid(e) => (e.center.clone(), e.semi_axes.iter().cloned().fold(0.0, f64::max)),
            Domain::Polytope(p) => p.bounding_ball(),
            Domain::Stadium(s) => {
                let c = vec![0.5 * (s.p[0] + s.q[0]), 0.5 * (s.p[1] + s.q[1])];
                (c, 0.5 * s.diameter())
            }
            Domain::MultiAnnulus(m) => (m.center.clone(), m.outer_radius()),
            Domain::Implicit(d) => (d.bounding_center.clone(), d.bounding_radius),
        }
    }

    /// The same shape moved by `shift`.
    pub fn translated(&self, shift: &[f64]) -> Result<Domain> {
        if shift.len() != self.dimension() {
            return Err(Error::DimensionMismatch { expected: self.dimension(), got: shift.len() });
        }
        let mv = |p: &[f64]| add_scaled(p, 1.0, shift);
        Ok(match self {
            Domain::Ball(b) => Domain::Ball(Ball { center: mv(&b.center), radius: b.radius }),
            Domain::Ellipsoid(e) => {
                Domain::Ellipsoid(Ellipsoid { center: mv(&e.center), semi_axes: e.semi_axes.clone() })
            }
            Domain::Polytope(p) => Domain::Polytope(p.translated(shift)),
            Domain::Stadium(s) => Domain::Stadium(Stadium {
                p: [s.p[0] + shift[0], s.p[1] + shift[1]],
                q: [s.q[0] + shift[0], s.q[1] + shift[1]],
                radius: s.radius,
            }),
            Domain::MultiAnnulus(m) => {
                Domain::MultiAnnulus(MultiAnnulus { center: mv(&m.center), rings: m.rings.clone() })
            }
            Domain::Implicit(d) => {
                let inner = d.predicate.clone();
                let back: Vec<f64> = shift.to_vec();
                let predicate: Predicate = Arc::new(move |x: &[f64]| {
                    let y: Vec<f64> = x.iter().zip(&back).map(|(a, b)| a - b).collect();
                    inner(&y)
                });
                Domain::Implicit(ImplicitDomain {
                    dimension: d.dimension,
                    predicate,
                    interior_point: mv(&d.interior_point),
                    bounding_center: mv(&d.bounding_center),
                    bounding_radius: d.bounding_radius,
                })
            }
        })
    }

    /// Rejection-samples an interior point at least `min_distance` from the boundary.
    /// Gives up after `max_tries` draws.
    pub fn sample_interior<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        min_distance: f64,
        max_tries: usize,
    ) -> Option<Vec<f64>> {
        let (c, r) = self.bounding_ball();
        for _ in 0..max_tries {
            let x: Vec<f64> = c.iter().map(|ci| ci + r * (2.0 * rng.random::<f64>() - 1.0)).collect();
            if self.contains(&x) && self.boundary_distance(&x) >= min_distance {
                return Some(x);
            }
        }
        None
    }
}

/// Radii must satisfy `0 < a_1 < b_1 < a_2 < ... < b_m`.
pub fn validate_rings(rings: &[(f64, f64)]) -> Result<()> {
    if rings.is_empty() {
        return Err(Error::InvalidDomain("at least one ring is required".into()));
    }
    let mut prev = 0.0;
    for (i, &(a, b)) in rings.iter().enumerate() {
        if !(a.is_finite() && b.is_finite() && a > prev && b > a) {
            return Err(Error::InvalidDomain(format!("ring {i} = ({a}, {b}) violates 0 < a1 < b1 < a2 < ... < bm")));
        }
        prev = b;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dir(v: &[f64]) -> UnitDirection {
        UnitDirection::new(v.to_vec()).unwrap()
    }

    #[test]
    fn membership_is_open() {
        let ball = Domain::ball([0.0, 0.0], 1.0).unwrap();
        assert!(ball.contains(&[0.0, 0.0]));
        assert!(!ball.contains(&[1.0, 0.0]));
        let ann = Domain::multi_annulus([0.0, 0.0], vec![(1.0, 2.0)]).unwrap();
        assert!(ann.contains(&[1.5, 0.0]));
        assert!(!ann.contains(&[0.5, 0.0]));
        assert!(!ann.contains(&[2.0, 0.0]));
    }

    #[test]
    fn ball_ray_exit() {
        let ball = Domain::ball([0.0, 0.0], 1.0).unwrap();
        for k in 0..12 {
            let th = k as f64 * 0.5;
            let w = dir(&[th.cos(), th.sin()]);
            let ex = ball.ray_exit(&[0.0, 0.0], &w).unwrap();
            assert_abs_diff_eq!(ex.rho, 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(ex.normal[0], w.as_slice()[0], epsilon = 1e-15);
            assert_abs_diff_eq!(ex.normal[1], w.as_slice()[1], epsilon = 1e-15);
        }
        let ex = ball.ray_exit(&[0.5, 0.0], &dir(&[1.0, 0.0])).unwrap();
        assert_abs_diff_eq!(ex.rho, 0.5, epsilon = 1e-15);
        assert_eq!(ex.normal, vec![1.0, 0.0]);
    }

    #[test]
    fn square_top_face() {
        let sq = Domain::axis_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let ex = sq.ray_exit(&[0.5, 0.5], &dir(&[0.0, 1.0])).unwrap();
        assert_abs_diff_eq!(ex.rho, 0.5, epsilon = 1e-15);
        assert_eq!(ex.normal, vec![0.0, 1.0]);
    }

    #[test]
    fn polytope_ties_use_lowest_face() {
        let sq = Domain::axis_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        // faces are ordered +x, -x, +y, -y; the diagonal hits +x and +y at the corner
        let ex = sq.ray_exit(&[0.5, 0.5], &dir(&[1.0, 1.0])).unwrap();
        assert_eq!(ex.normal, vec![1.0, 0.0]);
    }

    #[test]
    fn translation_identity_on_ball() {
        let ball = Domain::ball([0.0, 0.0], 1.0).unwrap();
        let w = dir(&[1.0, 0.0]);
        let r1 = ball.rho(&[0.2, 0.0], &w).unwrap();
        let r2 = ball.rho(&[0.5, 0.0], &w).unwrap();
        assert_abs_diff_eq!(r1, 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(r2, r1 - 0.3, epsilon = 1e-15);
    }

    #[test]
    fn ray_exit_errors() {
        let ball = Domain::ball([0.0, 0.0], 1.0).unwrap();
        assert_eq!(ball.ray_exit(&[2.0, 0.0], &dir(&[1.0, 0.0])), Err(Error::PointNotInterior));
        let ann = Domain::multi_annulus([0.0, 0.0], vec![(1.0, 2.0)]).unwrap();
        assert_eq!(ann.ray_exit(&[1.5, 0.0], &dir(&[1.0, 0.0])), Err(Error::NonConvexDomain));
    }

    #[test]
    fn unbounded_polytope_is_rejected() {
        let faces = vec![
            Halfspace { normal: vec![1.0, 0.0], offset: 1.0 },
            Halfspace { normal: vec![0.0, 1.0], offset: 1.0 },
            Halfspace { normal: vec![-1.0, 0.0], offset: 1.0 },
        ];
        assert!(matches!(Domain::polytope(faces), Err(Error::DegenerateDomain(_))));
        let empty = vec![
            Halfspace { normal: vec![1.0, 0.0], offset: -1.0 },
            Halfspace { normal: vec![-1.0, 0.0], offset: -1.0 },
            Halfspace { normal: vec![0.0, 1.0], offset: 1.0 },
            Halfspace { normal: vec![0.0, -1.0], offset: 1.0 },
        ];
        assert!(Domain::polytope(empty).is_err());
    }

    #[test]
    fn complement_intervals_examples() {
        let ball = Domain::ball([0.0, 0.0], 1.0).unwrap();
        let iv = ball.complement_intervals(&[0.0, 0.0], &dir(&[0.3, -0.4])).unwrap();
        assert_eq!(iv.len(), 1);
        assert_abs_diff_eq!(iv.intervals()[0].0, 1.0, epsilon = 1e-15);
        assert!(iv.intervals()[0].1.is_infinite());

        let ann = Domain::multi_annulus([0.0, 0.0], vec![(1.0, 2.0)]).unwrap();
        let iv = ann.complement_intervals(&[1.5, 0.0], &dir(&[-1.0, 0.0])).unwrap();
        assert_eq!(iv.len(), 2);
        assert_abs_diff_eq!(iv.intervals()[0].0, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(iv.intervals()[0].1, 2.5, epsilon = 1e-14);
        assert_abs_diff_eq!(iv.intervals()[1].0, 3.5, epsilon = 1e-14);
        assert!(iv.intervals()[1].1.is_infinite());
    }

    #[test]
    fn complement_interval_matches_dense_scan() {
        let ann = Domain::multi_annulus([0.0, 0.0], vec![(1.0, 2.0)]).unwrap();
        let xi = [1.5, 0.0];
        let w = dir(&[0.0, 1.0]);
        let iv = ann.complement_intervals(&xi, &w).unwrap();
        assert_eq!(iv.len(), 1);
        // first t with xi + t w outside, scanning with step 1e-5
        let step = 1e-5;
        let mut t = 0.0;
        while ann.contains(&[xi[0], xi[1] + t]) {
            t += step;
        }
        assert!((iv.first_exit() - t).abs() <= step);
        assert_abs_diff_eq!(iv.first_exit(), 1.75_f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn metrics_examples() {
        let ball = Domain::ball([0.0, 0.0], 3.0).unwrap();
        assert_eq!(ball.metrics().diameter, 6.0);
        let unit = Domain::ball([0.0, 0.0], 1.0).unwrap();
        assert_abs_diff_eq!(unit.boundary_distance(&[0.5, 0.0]), 0.5, epsilon = 1e-15);
        let ell = Domain::ellipsoid([0.0, 0.0], [2.0, 1.0]).unwrap();
        assert_eq!(ell.metrics().diameter, 4.0);
        let sq = Domain::axis_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(sq.metrics().diameter, 2f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(sq.boundary_distance(&[0.25, 0.5]), 0.25, epsilon = 1e-15);
        assert_eq!(ball.metrics().lipschitz_bound(0.5), 12.0);
    }

    #[test]
    fn ellipse_boundary_distance_matches_dense_search() {
        let ell = Domain::ellipsoid([0.3, -0.2], [2.0, 1.0]).unwrap();
        for p in [[0.3, -0.2], [1.0, 0.1], [-1.2, -0.7], [0.3, 0.5], [1.9, -0.2], [0.31, 0.7]] {
            let exact = ell.boundary_distance(&p);
            let mut best = f64::INFINITY;
            let m = 200_000;
            for k in 0..m {
                let th = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                let y = [0.3 + 2.0 * th.cos(), -0.2 + th.sin()];
                best = best.min(((y[0] - p[0]).powi(2) + (y[1] - p[1]).powi(2)).sqrt());
            }
            assert!(exact <= best + 1e-12, "{exact} > {best}");
            assert!(best - exact < 1e-8, "{exact} vs {best}");
        }
    }

    #[test]
    fn ellipsoid_boundary_distance_on_short_axis_plane() {
        // components only along the long axes: the nearest point leaves the axis plane
        let ell = Domain::ellipsoid([0.0, 0.0, 0.0], [3.0, 2.0, 1.0]).unwrap();
        let d = ell.boundary_distance(&[0.5, 0.3, 0.0]);
        let mut best = f64::INFINITY;
        let m = 1500;
        for i in 0..=m {
            let th = std::f64::consts::PI * i as f64 / m as f64;
            for j in 0..2 * m {
                let ph = std::f64::consts::PI * j as f64 / m as f64;
                let y = [3.0 * th.sin() * ph.cos(), 2.0 * th.sin() * ph.sin(), th.cos()];
                best = best.min(((y[0] - 0.5).powi(2) + (y[1] - 0.3).powi(2) + y[2] * y[2]).sqrt());
            }
        }
        assert!(d <= best + 1e-12);
        assert!(best - d < 1e-5);
    }

    #[test]
    fn stadium_exit_and_normal() {
        let st = Domain::stadium([-1.0, 0.0], [1.0, 0.0], 1.0).unwrap();
        let up = st.ray_exit(&[0.0, 0.0], &dir(&[0.0, 1.0])).unwrap();
        assert_abs_diff_eq!(up.rho, 1.0, epsilon = 1e-15);
        assert_eq!(up.normal, vec![0.0, 1.0]);
        let right = st.ray_exit(&[0.0, 0.0], &dir(&[1.0, 0.0])).unwrap();
        assert_abs_diff_eq!(right.rho, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(right.normal[0], 1.0, epsilon = 1e-15);
        assert_eq!(st.metrics().diameter, 4.0);
        assert_abs_diff_eq!(st.boundary_distance(&[1.5, 0.0]), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn implicit_disk_matches_ball() {
        let imp =
            Domain::from_predicate(|x: &[f64]| x[0] * x[0] + x[1] * x[1] < 1.0, vec![0.0, 0.0], vec![0.0, 0.0], 1.0)
                .unwrap();
        let w = dir(&[0.6, 0.8]);
        let ex = imp.ray_exit(&[0.2, -0.1], &w).unwrap();
        let ball = Domain::ball([0.0, 0.0], 1.0).unwrap();
        let exact = ball.ray_exit(&[0.2, -0.1], &w).unwrap();
        assert!((ex.rho - exact.rho).abs() < 1e-11);
        assert!((ex.normal[0] - exact.normal[0]).abs() < 1e-4);
        assert!((ex.normal[1] - exact.normal[1]).abs() < 1e-4);
        assert!(!imp.has_normals());
    }

    #[test]
    fn ring_validation() {
        assert!(validate_rings(&[(1.0, 2.0), (3.0, 4.0)]).is_ok());
        assert!(validate_rings(&[(2.0, 1.0)]).is_err());
        assert!(validate_rings(&[(1.0, 2.0), (1.5, 4.0)]).is_err());
        assert!(validate_rings(&[(0.0, 2.0)]).is_err());
        assert!(validate_rings(&[]).is_err());
    }

    #[test]
    fn translated_domain_moves_rho() {
        let sq = Domain::axis_box(&[0.0, 0.0], &[1.0, 2.0]).unwrap();
        let moved = sq.translated(&[3.0, -1.0]).unwrap();
        let w = dir(&[0.3, 0.7]);
        let a = sq.rho(&[0.4, 0.9], &w).unwrap();
        let b = moved.rho(&[3.4, -0.1], &w).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-14);
    }
}
