//! Quadrature rules on the unit sphere `S^(n-1)`.
//!
//! Every rule carries positive weights summing to the sphere area. Integration evaluates nodes
//! in parallel but always reduces in the same pairwise order, so results do not depend on the
//! thread count.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::special::sphere_area;
use crate::vecops::{pairwise_sum, pairwise_sum_rows};

const CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    /// Equispaced angles on the circle.
    CircleUniform,
    /// Gauss-Legendre in `cos(theta)` times uniform azimuth on `S^2`.
    SphereProduct,
    /// Normalized Gaussian directions drawn in antipodal pairs.
    MonteCarlo { seed: u64 },
    /// Caller-supplied nodes and weights.
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Circle { nodes: usize },
    Product { polar: usize, azimuth: usize },
    Random { samples: usize, seed: u64 },
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphericalRule {
    dimension: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    kind: RuleKind,
    degree: usize,
    layout: Layout,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    if m <= 1 {
        return (vec![0.0], vec![2.0]);
    }
    // P_m(z) and P_m'(z) by the three-term recurrence
    let legendre = |z: f64| {
        let (mut p0, mut p1) = (1.0, z);
        for k in 2..=m {
            let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        (p1, m as f64 * (z * p1 - p0) / (z * z - 1.0))
    };
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    if m % 2 == 1 {
        x[m / 2] = 0.0;
    }
    (x, w)
}

/// Deterministic rule exact for polynomials in `w` of total degree `<= degree`.
pub fn build_rule(n: usize, degree: usize) -> Result<SphericalRule> {
    if degree == 0 {
        return Err(Error::InvalidArgument("accuracy degree must be at least 1".into()));
    }
    match n {
        2 => Ok(SphericalRule::circle_with_degree(2 * degree, degree)),
        3 => {
            let polar = (degree + 1).div_ceil(2);
            let azimuth = (degree + 1).next_multiple_of(2);
            Ok(SphericalRule::product_with_degree(polar, azimuth, degree))
        }
        _ => Err(Error::UnsupportedDimension { dimension: n, what: "deterministic sphere rule" }),
    }
}

impl SphericalRule {
    /// `m` equispaced directions at angles `2 pi (k + 1/2) / m`.
    pub fn circle(m: usize) -> Self {
        let m = m.max(1);
        Self::circle_with_degree(m, (m / 2).max(1))
    }

    fn circle_with_degree(m: usize, degree: usize) -> Self {
        let mut nodes = Vec::with_capacity(2 * m);
        for k in 0..m {
            let th = 2.0 * PI * (k as f64 + 0.5) / m as f64;
            nodes.push(th.cos());
            nodes.push(th.sin());
        }
        SphericalRule {
            dimension: 2,
            nodes,
            weights: vec![2.0 * PI / m as f64; m],
            kind: RuleKind::CircleUniform,
            degree,
            layout: Layout::Circle { nodes: m },
        }
    }

    /// Product rule on `S^2` with explicit polar and azimuthal counts. The polar axis is `e_3`.
    pub fn sphere_product_with(polar: usize, azimuth: usize) -> Self {
        let polar = polar.max(1);
        let azimuth = azimuth.max(1);
        let degree = (2 * polar - 1).min(azimuth.saturating_sub(1)).max(1);
        Self::product_with_degree(polar, azimuth, degree)
    }

    fn product_with_degree(polar: usize, azimuth: usize, degree: usize) -> Self {
        let (t, wt) = gauss_legendre(polar);
        let mut nodes = Vec::with_capacity(3 * polar * azimuth);
        let mut weights = Vec::with_capacity(polar * azimuth);
        let dphi = 2.0 * PI / azimuth as f64;
        for (ti, wi) in t.iter().zip(&wt) {
            let s = (1.0 - ti * ti).max(0.0).sqrt();
            for k in 0..azimuth {
                let phi = dphi * (k as f64 + 0.5);
                nodes.extend_from_slice(&[s * phi.cos(), s * phi.sin(), *ti]);
                weights.push(wi * dphi);
            }
        }
        SphericalRule {
            dimension: 3,
            nodes,
            weights,
            kind: RuleKind::SphereProduct,
            degree,
            layout: Layout::Product { polar, azimuth },
        }
    }

    /// `samples` directions (rounded up to even) with equal weights, reproducible from `seed`.
    pub fn monte_carlo(n: usize, samples: usize, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::UnsupportedDimension { dimension: n, what: "sphere rule" });
        }
        let pairs = samples.div_ceil(2).max(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut nodes = Vec::with_capacity(2 * pairs * n);
        let mut v = vec![0.0; n];
        for _ in 0..pairs {
            loop {
                for x in v.iter_mut() {
                    *x = StandardNormal.sample(&mut rng);
                }
                let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if len > 1e-12 {
                    v.iter_mut().for_each(|x| *x /= len);
                    break;
                }
            }
            nodes.extend_from_slice(&v);
            nodes.extend(v.iter().map(|x| -x));
        }
        let count = 2 * pairs;
        Ok(SphericalRule {
            dimension: n,
            nodes,
            weights: vec![sphere_area(n) / count as f64; count],
            kind: RuleKind::MonteCarlo { seed },
            degree: 1,
            layout: Layout::Random { samples: count, seed },
        })
    }

    /// A rule from explicit unit nodes (`n` coordinates each, concatenated) and positive weights.
    /// Useful for rules graded towards known singular directions; such a rule has no refinement.
    pub fn from_parts(n: usize, nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::UnsupportedDimension { dimension: n, what: "sphere rule" });
        }
        if weights.is_empty() || nodes.len() != n * weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} node coordinates do not match {} weights in dimension {n}",
                nodes.len(),
                weights.len()
            )));
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidArgument(format!("weight {i} is not positive")));
        }
        for (i, v) in nodes.chunks_exact(n).enumerate() {
            let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !((len - 1.0).abs() <= 1e-12) {
                return Err(Error::InvalidArgument(format!("node {i} is not a unit vector")));
            }
        }
        Ok(SphericalRule { dimension: n, nodes, weights, kind: RuleKind::Custom, degree: 1, layout: Layout::Custom })
    }

    /// Deterministic rule for `n <= 3`, Monte Carlo with a node count comparable to the
    /// three-dimensional product rule otherwise.
    pub fn for_dimension(n: usize, degree: usize, seed: u64) -> Result<Self> {
        match n {
            2 | 3 => build_rule(n, degree),
            _ => {
                let d = degree.max(1);
                Self::monte_carlo(n, (d + 1) * (d + 1) * 64, seed)
            }
        }
    }

    /// A rule with twice the resolution per coordinate. Custom rules come back unchanged.
    pub fn refined(&self) -> Self {
        match self.layout {
            Layout::Circle { nodes } => Self::circle_with_degree(2 * nodes, 2 * self.degree),
            Layout::Product { polar, azimuth } => {
                Self::product_with_degree(2 * polar, 2 * azimuth, 2 * self.degree + 1)
            }
            Layout::Random { samples, seed } => {
                Self::monte_carlo(self.dimension, 2 * samples, seed).expect("dimension already validated")
            }
            Layout::Custom => self.clone(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    /// Polynomial degree integrated exactly (1 for Monte Carlo rules).
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dimension..(i + 1) * self.dimension]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> {
        self.nodes.chunks_exact(self.dimension)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `sum_i w_i g(w_i)` in a fixed pairwise order.
    pub fn integrate<G>(&self, g: G) -> Result<f64>
    where
        G: Fn(&[f64]) -> f64 + Sync,
    {
        let n = self.dimension;
        let partial: Vec<std::result::Result<f64, usize>> = self
            .weights
            .par_chunks(CHUNK)
            .enumerate()
            .map(|(c, ws)| {
                let base = c * CHUNK;
                let mut vals = Vec::with_capacity(ws.len());
                for (j, w) in ws.iter().enumerate() {
                    let i = base + j;
                    let v = g(&self.nodes[i * n..(i + 1) * n]);
                    if !v.is_finite() {
                        return Err(i);
                    }
                    vals.push(w * v);
                }
                Ok(pairwise_sum(&vals))
            })
            .collect();
        let mut sums = Vec::with_capacity(partial.len());
        for p in partial {
            sums.push(p.map_err(|index| Error::NonFiniteSample { index })?);
        }
        Ok(pairwise_sum(&sums))
    }

    /// Vector-valued version of [`integrate`](Self::integrate): `g` writes `width` values per node.
    pub fn integrate_vec<G>(&self, width: usize, g: G) -> Result<Vec<f64>>
    where
        G: Fn(&[f64], &mut [f64]) + Sync,
    {
        let n = self.dimension;
        let partial: Vec<std::result::Result<Vec<f64>, usize>> = self
            .weights
            .par_chunks(CHUNK)
            .enumerate()
            .map(|(c, ws)| {
                let base = c * CHUNK;
                let mut rows = vec![0.0; ws.len() * width];
                for (j, w) in ws.iter().enumerate() {
                    let i = base + j;
                    let row = &mut rows[j * width..(j + 1) * width];
                    g(&self.nodes[i * n..(i + 1) * n], row);
                    if row.iter().any(|v| !v.is_finite()) {
                        return Err(i);
                    }
                    row.iter_mut().for_each(|v| *v *= w);
                }
                let mut out = vec![0.0; width];
                pairwise_sum_rows(&rows, width, &mut out);
                Ok(out)
            })
            .collect();
        let mut flat = Vec::with_capacity(partial.len() * width);
        for p in partial {
            flat.extend(p.map_err(|index| Error::NonFiniteSample { index })?);
        }
        let mut out = vec![0.0; width];
        pairwise_sum_rows(&flat, width, &mut out);
        Ok(out)
    }
}

/// Fixed direction set used to probe boundary distance where no closed form exists.
pub(crate) fn probe_directions(n: usize) -> Vec<f64> {
    match n {
        2 => SphericalRule::circle(720).nodes,
        3 => SphericalRule::sphere_product_with(24, 48).nodes,
        _ => SphericalRule::monte_carlo(n, 4096, 0).expect("n >= 2").nodes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annulus_series::gegenbauer;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_is_exact() {
        for m in 1..12 {
            let (x, w) = gauss_legendre(m);
            for p in 0..(2 * m) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "m={m} p={p}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn weights_sum_to_area() {
        let c = build_rule(2, 8).unwrap();
        assert_eq!(c.len(), 16);
        assert_relative_eq!(c.weights().iter().sum::<f64>(), 2.0 * PI, max_relative = 1e-14);
        for d in [1, 4, 9, 30] {
            let s = build_rule(3, d).unwrap();
            assert_relative_eq!(s.weights().iter().sum::<f64>(), 4.0 * PI, max_relative = 1e-13);
            assert!(s.weights().iter().all(|&w| w > 0.0));
        }
        let mc = SphericalRule::monte_carlo(5, 1001, 3).unwrap();
        assert_eq!(mc.len(), 1002);
        assert_relative_eq!(mc.weights().iter().sum::<f64>(), sphere_area(5), max_relative = 1e-12);
    }

    #[test]
    fn nodes_are_unit() {
        for rule in
            [build_rule(2, 5).unwrap(), build_rule(3, 7).unwrap(), SphericalRule::monte_carlo(4, 64, 1).unwrap()]
        {
            for w in rule.nodes() {
                let len: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!((len - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn circle_examples() {
        let rule = build_rule(2, 8).unwrap();
        let v = rule.integrate(|w| w[0] * w[0]).unwrap();
        assert_relative_eq!(v, PI, max_relative = 1e-14);
        let c2 = build_rule(2, 40).unwrap().integrate(|w| gegenbauer(2, 2.0, w[0])).unwrap();
        assert_relative_eq!(c2, 8.0 * PI, max_relative = 1e-12);
        assert!(rule.integrate(|w| w[0]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn sphere_polynomial_exactness() {
        let d = 10;
        let rule = build_rule(3, d).unwrap();
        // integral of x^2a y^2b z^2c over S^2 = 2 G(a+1/2) G(b+1/2) G(c+1/2) / G(a+b+c+3/2)
        let g = |x: f64| statrs::function::gamma::gamma(x);
        for a in 0..=5 {
            for b in 0..=(5 - a) {
                for c in 0..=(5 - a - b) {
                    let exact =
                        2.0 * g(a as f64 + 0.5) * g(b as f64 + 0.5) * g(c as f64 + 0.5) / g((a + b + c) as f64 + 1.5);
                    let q = rule.integrate(|w| w[0].powi(2 * a) * w[1].powi(2 * b) * w[2].powi(2 * c)).unwrap();
                    assert_relative_eq!(q, exact, max_relative = 1e-12);
                }
            }
        }
        assert!(rule.integrate(|w| w[0] * w[1] * w[1] + w[2].powi(3)).unwrap().abs() < 1e-12);
        assert!(rule.integrate(|w| w[2]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn non_finite_samples_are_reported() {
        let rule = build_rule(2, 4).unwrap();
        let err = rule.integrate(|w| if w[0] > 0.9 { f64::NAN } else { 1.0 }).unwrap_err();
        assert!(matches!(err, Error::NonFiniteSample { .. }));
    }

    #[test]
    fn unsupported_dimension() {
        assert!(matches!(build_rule(4, 3), Err(Error::UnsupportedDimension { .. })));
    }

    #[test]
    fn reduction_does_not_depend_on_thread_count() {
        let rule = build_rule(3, 120).unwrap();
        let f = |w: &[f64]| (3.0 * w[0] + w[1] * w[2]).exp();
        let a = rule.integrate(f).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| rule.integrate(f).unwrap());
        assert_eq!(a.to_bits(), b.to_bits());
        let va = rule.integrate_vec(2, |w, out| {
            out[0] = f(w);
            out[1] = w[0];
        });
        let vb = pool.install(|| {
            rule.integrate_vec(2, |w, out| {
                out[0] = f(w);
                out[1] = w[0];
            })
        });
        assert_eq!(va, vb);
        assert_eq!(va.unwrap()[0].to_bits(), a.to_bits());
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let a = SphericalRule::monte_carlo(4, 100, 42).unwrap();
        let b = SphericalRule::monte_carlo(4, 100, 42).unwrap();
        let c = SphericalRule::monte_carlo(4, 100, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.integrate(|w| w[1] + w[3].powi(3)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn refinement_doubles_resolution() {
        let c = build_rule(2, 8).unwrap();
        assert_eq!(c.refined().len(), 32);
        let s = SphericalRule::sphere_product_with(5, 10);
        assert_eq!(s.refined().len(), 200);
    }
}
