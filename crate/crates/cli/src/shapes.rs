//! Random convex shapes and interior points for the invariant suites.

use std::f64::consts::PI;

use psikit_core::geometry::Halfspace;
use psikit_core::sphere_quadrature::build_rule;
use psikit_core::{Domain, SphericalRule, UnitDirection};
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Ball,
    Ellipsoid,
    Polytope,
    Stadium,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Ball, Family::Ellipsoid, Family::Polytope, Family::Stadium];

    pub fn name(self) -> &'static str {
        match self {
            Family::Ball => "ball",
            Family::Ellipsoid => "ellipsoid",
            Family::Polytope => "polytope",
            Family::Stadium => "stadium",
        }
    }

    /// Dimensions exercised for this family.
    pub fn dimensions(self) -> &'static [usize] {
        match self {
            Family::Stadium => &[2],
            _ => &[2, 3],
        }
    }
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

pub fn random_direction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> UnitDirection {
    loop {
        // rejection from the cube keeps the distribution uniform
        let v: Vec<f64> = (0..n).map(|_| uniform(rng, -1.0, 1.0)).collect();
        let len2: f64 = v.iter().map(|x| x * x).sum();
        if len2 > 1e-6 && len2 <= 1.0 {
            return UnitDirection::new(v).expect("nonzero");
        }
    }
}

/// A random bounded polytope with `faces` half-spaces around a random center.
pub fn random_polytope<R: Rng + ?Sized>(rng: &mut R, n: usize, faces: usize) -> Domain {
    loop {
        let center: Vec<f64> = (0..n).map(|_| uniform(rng, -1.0, 1.0)).collect();
        let hs: Vec<Halfspace> = (0..faces)
            .map(|_| {
                let a = random_direction(rng, n).as_slice().to_vec();
                let offset = uniform(rng, 0.5, 1.5) + a.iter().zip(&center).map(|(x, y)| x * y).sum::<f64>();
                Halfspace { normal: a, offset }
            })
            .collect();
        if let Ok(d) = Domain::polytope(hs) {
            // keep reasonably round shapes so the suites are not dominated by slivers
            let m = d.metrics();
            if d.boundary_distance(&center) > 0.04 * m.diameter {
                return d;
            }
        }
    }
}

pub fn random_domain<R: Rng + ?Sized>(rng: &mut R, family: Family, n: usize) -> Domain {
    let center: Vec<f64> = (0..n).map(|_| uniform(rng, -1.0, 1.0)).collect();
    match family {
        Family::Ball => Domain::ball(center, uniform(rng, 0.5, 3.0)).expect("valid ball"),
        Family::Ellipsoid => {
            let axes: Vec<f64> = (0..n).map(|_| uniform(rng, 0.3, 2.5)).collect();
            Domain::ellipsoid(center, axes).expect("valid ellipsoid")
        }
        Family::Polytope => {
            let faces = if n == 2 { rng.random_range(5..=10) } else { rng.random_range(8..=14) };
            random_polytope(rng, n, faces)
        }
        Family::Stadium => {
            let th = uniform(rng, 0.0, 2.0 * PI);
            let len = uniform(rng, 0.2, 2.0);
            let p = [center[0], center[1]];
            let q = [p[0] + len * th.cos(), p[1] + len * th.sin()];
            Domain::stadium(p, q, uniform(rng, 0.3, 1.0)).expect("valid stadium")
        }
    }
}

/// Interior point at least `margin * diam` from the boundary.
pub fn interior_point<R: Rng + ?Sized>(rng: &mut R, dom: &Domain, margin: f64) -> Vec<f64> {
    dom.sample_interior(rng, margin * dom.diameter(), 10_000_000).expect("shape has a deep enough interior")
}

/// Deterministic rule with roughly `nodes` directions: circle in 2-D, product rule in 3-D.
pub fn rule_with_nodes(n: usize, nodes: usize) -> SphericalRule {
    match n {
        2 => SphericalRule::circle(nodes),
        3 => {
            let polar = ((nodes as f64 / 2.0).sqrt().ceil() as usize).max(2);
            SphericalRule::sphere_product_with(polar, 2 * polar)
        }
        _ => panic!("deterministic rules exist for n = 2, 3 only"),
    }
}

/// Default rule for smooth-domain checks.
pub fn default_rule(n: usize) -> SphericalRule {
    build_rule(n, if n == 2 { 256 } else { 48 }).expect("n is 2 or 3")
}

/// Random concentric rings around a random center, with an interior point at least
/// `margin` of the chosen ring's width from its edges.
pub fn random_multi_annulus<R: Rng + ?Sized>(rng: &mut R, n: usize, margin: f64) -> (Domain, Vec<f64>) {
    let center: Vec<f64> = (0..n).map(|_| uniform(rng, -1.0, 1.0)).collect();
    let count = rng.random_range(1..=3);
    let mut rings = Vec::with_capacity(count);
    let mut r = uniform(rng, 0.2, 0.8);
    for _ in 0..count {
        let b = r + uniform(rng, 0.3, 1.0);
        rings.push((r, b));
        r = b + uniform(rng, 0.2, 0.8);
    }
    let (a, b) = rings[rng.random_range(0..count)];
    let radius = uniform(rng, a + margin * (b - a), b - margin * (b - a));
    let dir = random_direction(rng, n);
    let xi: Vec<f64> = center.iter().zip(dir.as_slice()).map(|(c, w)| c + radius * w).collect();
    (Domain::multi_annulus(center, rings).expect("rings are interleaved"), xi)
}

/// Rule for a point at distance `r` from the center of concentric spheres with the given radii,
/// the point sitting on the last coordinate axis. Directions tangent to a sphere inside radius
/// `r` make the integrand behave like a square root, so the polar angle is split there and each
/// panel uses Gauss-Legendre after the substitution `theta = alpha + (beta - alpha)(1 - cos(pi u))/2`.
pub fn axis_graded_rule(n: usize, r: f64, radii: &[f64], points: usize) -> SphericalRule {
    let (u, wu) = psikit_core::sphere_quadrature::gauss_legendre(points);
    let span = if n == 2 { 2.0 * PI } else { PI };
    let mut breaks = vec![0.0, span];
    for &c in radii.iter().filter(|&&c| c < r) {
        let beta = (c / r).asin();
        breaks.push(PI - beta);
        if n == 2 {
            breaks.push(PI + beta);
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for pair in breaks.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        for (x, w) in u.iter().zip(&wu) {
            // map [-1, 1] to [0, 1] first
            let s = 0.5 * (x + 1.0);
            let th = lo + (hi - lo) * 0.5 * (1.0 - (PI * s).cos());
            let jac = 0.5 * w * (hi - lo) * 0.5 * PI * (PI * s).sin();
            if n == 2 {
                nodes.extend_from_slice(&[th.sin(), th.cos()]);
                weights.push(jac);
            } else {
                let azimuth = 4;
                for k in 0..azimuth {
                    let phi = 2.0 * PI * (k as f64 + 0.5) / azimuth as f64;
                    nodes.extend_from_slice(&[th.sin() * phi.cos(), th.sin() * phi.sin(), th.cos()]);
                    weights.push(jac * th.sin() * 2.0 * PI / azimuth as f64);
                }
            }
        }
    }
    SphericalRule::from_parts(n, nodes, weights).expect("nodes are unit vectors with positive weights")
}

/// Point at distance `r` on the last coordinate axis.
pub fn axis_point(n: usize, r: f64) -> Vec<f64> {
    let mut x = vec![0.0; n];
    x[n - 1] = r;
    x
}
