//! Invariant suites behind `psikit check`. Every suite is a deterministic function of the seed
//! and reports one line per invariant and shape with its worst observed value.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use psikit_core::annulus_series::{a_k, critical_radii, gegenbauer, i_j_integrals, psi_series, SeriesParams};
use psikit_core::functional::{eval_phi, eval_psi_general, grad_fd, grad_phi, hessian_phi, psi};
use psikit_core::oracle::{ball_radial_derivative, psi_cartesian, OracleConfig};
use psikit_core::solver::{minimize, uniqueness_audit};
use psikit_core::sphere_quadrature::{build_rule, gauss_legendre};
use psikit_core::{Domain, FunctionalSpec, Result, SolverConfig, SphericalRule, UnitDirection};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::shapes::{
    axis_graded_rule, axis_point, default_rule, interior_point, random_direction, random_domain, random_multi_annulus,
    rule_with_nodes, Family,
};
use crate::CliError;

pub const SUITES: [&str; 12] = [
    "concavity",
    "translation",
    "lipschitz",
    "transversality",
    "convexity",
    "gradient",
    "hessian",
    "gegenbauer",
    "annulus",
    "oracle",
    "ball",
    "symmetry",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    AtLeast,
    Above,
    Equal,
}

impl Relation {
    fn holds(self, worst: f64, limit: f64) -> bool {
        match self {
            Relation::AtMost => worst <= limit,
            Relation::AtLeast => worst >= limit,
            Relation::Above => worst > limit,
            Relation::Equal => worst == limit,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Above => ">",
            Relation::Equal => "==",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub name: String,
    pub passed: bool,
    pub worst: f64,
    pub relation: Relation,
    pub limit: f64,
}

impl Line {
    pub fn new(name: impl Into<String>, worst: f64, relation: Relation, limit: f64) -> Self {
        // NaN never passes
        let passed = relation.holds(worst, limit);
        Line { name: name.into(), passed, worst, relation, limit }
    }

    pub fn render(&self) -> String {
        format!(
            "{} {} worst={:.6e} {} {:.6e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.worst,
            self.relation.symbol(),
            self.limit
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub lines: Vec<Line>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            out.push_str(&l.render());
            out.push('\n');
        }
        let failed = self.lines.iter().filter(|l| !l.passed).count();
        out.push_str(&format!("{} checks, {} failed\n", self.lines.len(), failed));
        out
    }
}

pub fn run_suite(name: &str, seed: u64) -> std::result::Result<Report, CliError> {
    let names: Vec<&str> = match name {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        other => {
            return Err(CliError::config(format!(
                "unknown suite '{other}'; expected one of all, {}",
                SUITES.join(", ")
            )))
        }
    };
    let mut report = Report::default();
    for s in names {
        report.lines.extend(suite(s, seed)?);
    }
    Ok(report)
}

/// Lines of a single named suite.
pub fn suite(name: &str, seed: u64) -> Result<Vec<Line>> {
    match name {
        "concavity" => concavity(seed),
        "translation" => translation(seed),
        "lipschitz" => lipschitz(seed),
        "transversality" => transversality(seed),
        "convexity" => convexity(seed),
        "gradient" => gradient(seed),
        "hessian" => hessian(seed),
        "gegenbauer" => gegenbauer_suite(),
        "annulus" => annulus(seed),
        "oracle" => oracle(seed),
        "ball" => ball(seed),
        "symmetry" => symmetry(seed),
        other => Err(psikit_core::Error::InvalidArgument(format!("unknown suite '{other}'"))),
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Every (family, dimension) pair with its own stream id.
fn cases(suite: u64) -> Vec<(Family, usize, u64)> {
    let mut out = Vec::new();
    for (fi, family) in Family::ALL.iter().enumerate() {
        for &n in family.dimensions() {
            out.push((*family, n, suite * 1000 + fi as u64 * 10 + n as u64));
        }
    }
    out
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| (1.0 - t) * x + t * y).collect()
}

const RHO_SAMPLES: usize = 1000;
const SAMPLES_PER_DOMAIN: usize = 20;

/// Runs `sample` on fresh random domains and folds the returned values with `fold`.
#[allow(clippy::too_many_arguments)]
fn rho_suite(
    seed: u64,
    suite_id: u64,
    label: &str,
    relation: Relation,
    limit: f64,
    fold: fn(f64, f64) -> f64,
    init: f64,
    sample: &dyn Fn(&mut ChaCha8Rng, &Domain) -> Result<f64>,
) -> Result<Vec<Line>> {
    let mut lines = Vec::new();
    for (family, n, stream) in cases(suite_id) {
        let mut rng = rng_for(seed, stream);
        let mut worst = init;
        let mut dom = random_domain(&mut rng, family, n);
        for i in 0..RHO_SAMPLES {
            if i > 0 && i % SAMPLES_PER_DOMAIN == 0 {
                dom = random_domain(&mut rng, family, n);
            }
            worst = fold(worst, sample(&mut rng, &dom)?);
        }
        lines.push(Line::new(format!("{label}/{}/n={n}", family.name()), worst, relation, limit));
    }
    Ok(lines)
}

/// `rho(mid) >= lambda rho(x1) + (1 - lambda) rho(x2)` up to 1e-10.
pub fn concavity(seed: u64) -> Result<Vec<Line>> {
    rho_suite(seed, 1, "concavity", Relation::AtMost, 1e-10, f64::max, f64::NEG_INFINITY, &|rng, dom| {
        let n = dom.dimension();
        let x1 = interior_point(rng, dom, 0.0);
        let x2 = interior_point(rng, dom, 0.0);
        let lam: f64 = rng.random();
        let w = random_direction(rng, n);
        let mid = lerp(&x2, &x1, lam);
        Ok(lam * dom.rho(&x1, &w)? + (1.0 - lam) * dom.rho(&x2, &w)? - dom.rho(&mid, &w)?)
    })
}

/// Moving along the ray shortens the exit distance by exactly the distance moved.
pub fn translation(seed: u64) -> Result<Vec<Line>> {
    rho_suite(seed, 2, "translation", Relation::AtMost, 1e-12, f64::max, 0.0, &|rng, dom| {
        let x1 = interior_point(rng, dom, 0.0);
        let mut x2 = interior_point(rng, dom, 0.0);
        while dist(&x1, &x2) == 0.0 {
            x2 = interior_point(rng, dom, 0.0);
        }
        let w = UnitDirection::between(&x1, &x2)?;
        Ok((dom.rho(&x2, &w)? - (dom.rho(&x1, &w)? - dist(&x1, &x2))).abs())
    })
}

/// `|rho(x) - rho(y)| <= (diam / delta) |x - y|` for points at least `delta` inside.
pub fn lipschitz(seed: u64) -> Result<Vec<Line>> {
    rho_suite(seed, 3, "lipschitz", Relation::AtMost, 1e-10, f64::max, f64::NEG_INFINITY, &|rng, dom| {
        let n = dom.dimension();
        let metrics = dom.metrics();
        let delta = 0.05 * metrics.diameter;
        let x = interior_point(rng, dom, 0.05);
        // a nearby partner makes the bound tighter than a far one
        let y = loop {
            let d = random_direction(rng, n);
            let t = rng.random::<f64>() * 0.05 * metrics.diameter;
            let y: Vec<f64> = x.iter().zip(d.as_slice()).map(|(a, b)| a + t * b).collect();
            if dom.contains(&y) && dom.boundary_distance(&y) >= delta {
                break y;
            }
        };
        let w = random_direction(rng, n);
        Ok((dom.rho(&x, &w)? - dom.rho(&y, &w)?).abs() - metrics.lipschitz_bound(delta) * dist(&x, &y))
    })
}

/// `nu . omega >= delta / diam` with `delta` the boundary distance of the start point.
pub fn transversality(seed: u64) -> Result<Vec<Line>> {
    rho_suite(seed, 4, "transversality", Relation::AtLeast, -1e-10, f64::min, f64::INFINITY, &|rng, dom| {
        let n = dom.dimension();
        let x = interior_point(rng, dom, 0.0);
        let w = random_direction(rng, n);
        let exit = dom.ray_exit(&x, &w)?;
        let cos: f64 = exit.normal.iter().zip(w.as_slice()).map(|(a, b)| a * b).sum();
        Ok(cos - dom.boundary_distance(&x) / dom.diameter())
    })
}

const CONVEXITY_PAIRS: usize = 200;

/// Strict midpoint convexity of the discretized `psi`: smallest `(avg - mid) / avg` must be positive.
pub fn convexity(seed: u64) -> Result<Vec<Line>> {
    let spec = FunctionalSpec::psi();
    let mut lines = Vec::new();
    for (family, n, stream) in cases(5) {
        let mut rng = rng_for(seed, stream);
        let rule = default_rule(n);
        let mut worst = f64::INFINITY;
        let mut dom = random_domain(&mut rng, family, n);
        for i in 0..CONVEXITY_PAIRS {
            if i > 0 && i % 10 == 0 {
                dom = random_domain(&mut rng, family, n);
            }
            let diam = dom.diameter();
            let x1 = interior_point(&mut rng, &dom, 0.02);
            let x2 = loop {
                let y = interior_point(&mut rng, &dom, 0.02);
                if dist(&x1, &y) >= 0.1 * diam {
                    break y;
                }
            };
            let mid = lerp(&x1, &x2, 0.5);
            let avg = 0.5 * (eval_phi(&dom, &x1, &spec, &rule)? + eval_phi(&dom, &x2, &spec, &rule)?);
            worst = worst.min((avg - eval_phi(&dom, &mid, &spec, &rule)?) / avg);
        }
        lines.push(Line::new(format!("convexity/{}/n={n}", family.name()), worst, Relation::Above, 0.0));
    }
    Ok(lines)
}

const GRADIENT_POINTS: usize = 100;

/// Nodes of the rule used for gradient checks on polytopes.
pub const POLYTOPE_GRADIENT_NODES: usize = 16384;

/// Analytic gradient against central differences of the same discretization.
pub fn gradient(seed: u64) -> Result<Vec<Line>> {
    let spec = FunctionalSpec::psi();
    let mut lines = Vec::new();
    for (family, n, stream) in cases(6) {
        let mut rng = rng_for(seed, stream);
        let (rule, limit) = match family {
            Family::Polytope => (rule_with_nodes(n, POLYTOPE_GRADIENT_NODES), 1e-3),
            _ => (default_rule(n), 1e-5),
        };
        let mut worst: f64 = 0.0;
        let mut dom = random_domain(&mut rng, family, n);
        for i in 0..GRADIENT_POINTS {
            if i > 0 && i % 10 == 0 {
                dom = random_domain(&mut rng, family, n);
            }
            let x = interior_point(&mut rng, &dom, 0.05);
            let g = grad_phi(&dom, &x, &spec, &rule)?;
            let fd = grad_fd(&dom, &x, &spec, &rule, None)?;
            let diff: Vec<f64> = g.iter().zip(&fd).map(|(a, b)| a - b).collect();
            worst = worst.max(norm(&diff) / norm(&g));
        }
        lines.push(Line::new(format!("gradient/{}/n={n}", family.name()), worst, Relation::AtMost, limit));
    }
    Ok(lines)
}

const HESSIAN_POINTS: usize = 50;

/// Smallest eigenvalue of the Hessian relative to the largest; must be positive.
pub fn hessian(seed: u64) -> Result<Vec<Line>> {
    let spec = FunctionalSpec::psi();
    let mut lines = Vec::new();
    for (family, n, stream) in cases(7) {
        if family == Family::Stadium {
            continue;
        }
        let mut rng = rng_for(seed, stream);
        let rule = default_rule(n);
        let mut worst = f64::INFINITY;
        let mut dom = random_domain(&mut rng, family, n);
        for i in 0..HESSIAN_POINTS {
            if i > 0 && i % 10 == 0 {
                dom = random_domain(&mut rng, family, n);
            }
            let x = interior_point(&mut rng, &dom, 0.02);
            let h = DMatrix::from_row_slice(n, n, &hessian_phi(&dom, &x, &spec, &rule)?);
            let eig = h.symmetric_eigen().eigenvalues;
            worst = worst.min(eig.min() / eig.max().abs());
        }
        lines.push(Line::new(format!("hessian_min_eigenvalue/{}/n={n}", family.name()), worst, Relation::Above, 0.0));
    }
    Ok(lines)
}

/// `I_m` and `J_m` from their defining integrals, written in `theta` so that the weight
/// `(1 - t^2)^((n-3)/2) dt` becomes `sin^(n-2) theta d theta`.
pub fn i_j_by_quadrature(n: usize, m: usize, points: usize) -> (f64, f64) {
    let (x, w) = gauss_legendre(points);
    let lambda = n as f64;
    let (mut i, mut j) = (0.0, 0.0);
    for (xk, wk) in x.iter().zip(&w) {
        let th = 0.5 * PI * (xk + 1.0);
        let t = th.cos();
        let weight = 0.5 * PI * wk * th.sin().powi(n as i32 - 2);
        i += weight * gegenbauer(2 * m, lambda, t);
        j += weight * t * gegenbauer(2 * m + 1, lambda, t);
    }
    (i, j)
}

/// `A_k` by integrating `C_k^(n)(omega_1)` with a sphere rule.
pub fn a_k_by_quadrature(n: usize, k: usize, rule: &SphericalRule) -> Result<f64> {
    rule.integrate(|w| gegenbauer(k, n as f64, w[0]))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn gegenbauer_suite() -> Result<Vec<Line>> {
    let mut lines = Vec::new();
    for n in [2, 3] {
        let rule = build_rule(n, 64)?;
        let odd = (0..=10).map(|m| a_k(n, 2 * m + 1).abs()).fold(0.0, f64::max);
        lines.push(Line::new(format!("a_odd_vanishes/n={n}"), odd, Relation::Equal, 0.0));
        let mut worst: f64 = 0.0;
        for m in 0..=10 {
            worst = worst.max(rel(a_k_by_quadrature(n, 2 * m, &rule)?, a_k(n, 2 * m)));
        }
        lines.push(Line::new(format!("a_even_vs_sphere_quadrature/n={n}"), worst, Relation::AtMost, 1e-8));
    }
    for n in [2, 3, 4] {
        let (mut wi, mut wj, mut wr) = (0.0_f64, 0.0_f64, 0.0_f64);
        for m in 0..=10 {
            let (i, j) = i_j_integrals(n, m);
            let (qi, qj) = i_j_by_quadrature(n, m, 64);
            wi = wi.max(rel(i, qi));
            wj = wj.max(rel(j, qj));
            let expected = 2.0 * (m + n) as f64 / (2 * m + n) as f64;
            wr = wr.max((j / i - expected).abs());
        }
        lines.push(Line::new(format!("i_closed_vs_gauss_legendre/n={n}"), wi, Relation::AtMost, 1e-8));
        lines.push(Line::new(format!("j_closed_vs_gauss_legendre/n={n}"), wj, Relation::AtMost, 1e-8));
        lines.push(Line::new(format!("j_over_i_ratio/n={n}"), wr, Relation::AtMost, 1e-12));
    }
    Ok(lines)
}

/// Panel points of the graded rule used against the series.
pub const GRADED_POINTS: usize = 200;

/// `psi` by the spherical reduction on concentric rings centered at the origin.
pub fn ring_psi(n: usize, rings: &[(f64, f64)], r: f64) -> Result<f64> {
    let dom = Domain::multi_annulus(vec![0.0; n], rings.to_vec())?;
    let radii: Vec<f64> = rings.iter().flat_map(|&(a, b)| [a, b]).collect();
    eval_psi_general(&dom, &axis_point(n, r), &axis_graded_rule(n, r, &radii, GRADED_POINTS))
}

pub const SINGLE_RINGS: [(f64, f64); 2] = [(1.0, 2.0), (0.5, 3.0)];
pub const TRIPLE_RINGS: [(f64, f64); 3] = [(1.0, 2.0), (3.0, 4.0), (5.0, 6.0)];

pub fn annulus(seed: u64) -> Result<Vec<Line>> {
    let mut lines = Vec::new();
    for (ri, &(a, b)) in SINGLE_RINGS.iter().enumerate() {
        for n in [2, 3] {
            let tag = format!("({a},{b})/n={n}");
            let width = b - a;
            let params = SeriesParams::new(n, vec![(a, b)])?;
            let mut d2_min = f64::INFINITY;
            for i in 0..100 {
                let r = a + width * (i as f64 + 0.5) / 100.0;
                d2_min = d2_min.min(psi_series(&params, r)?.d2);
            }
            lines.push(Line::new(format!("annulus_second_derivative/{tag}"), d2_min, Relation::Above, 0.0));

            let mut rng = rng_for(seed, 9000 + 10 * ri as u64 + n as u64);
            let mut worst: f64 = 0.0;
            for _ in 0..20 {
                let r = a + width * (0.01 + 0.98 * rng.random::<f64>());
                worst = worst.max(rel(ring_psi(n, &[(a, b)], r)?, psi_series(&params, r)?.psi));
            }
            lines.push(Line::new(format!("annulus_series_vs_reduction/{tag}"), worst, Relation::AtMost, 1e-6));

            let roots = critical_radii(&params)?;
            lines.push(Line::new(format!("annulus_root_count/{tag}"), roots.len() as f64, Relation::Equal, 1.0));
            if let Some(&r0) = roots.first() {
                let h = 1e-6 * width;
                let below = psi_series(&params, r0 - h)?.d1;
                let above = psi_series(&params, r0 + h)?.d1;
                // the slope product is negative when the sign changes
                lines.push(Line::new(
                    format!("annulus_root_sign_change/{tag}"),
                    if below < 0.0 && above > 0.0 { -1.0 } else { 1.0 },
                    Relation::Equal,
                    -1.0,
                ));
                let samples = 1000;
                let mut best = (f64::INFINITY, a);
                for i in 0..samples {
                    let r = a + width * (i + 1) as f64 / (samples + 1) as f64;
                    let v = ring_psi(n, &[(a, b)], r)?;
                    if v < best.0 {
                        best = (v, r);
                    }
                }
                lines.push(Line::new(
                    format!("annulus_sweep_argmin_vs_root/{tag}"),
                    (best.1 - r0).abs() / width,
                    Relation::AtMost,
                    1e-3,
                ));
            }
        }
    }
    let params = SeriesParams::new(2, TRIPLE_RINGS.to_vec())?;
    let roots = critical_radii(&params)?;
    let per_ring =
        TRIPLE_RINGS.iter().map(|&(a, b)| roots.iter().filter(|&&r| r > a && r < b).count()).collect::<Vec<_>>();
    lines.push(Line::new("multi_annulus_root_count/n=2", roots.len() as f64, Relation::Equal, 3.0));
    lines.push(Line::new(
        "multi_annulus_rings_with_one_root/n=2",
        per_ring.iter().filter(|&&c| c == 1).count() as f64,
        Relation::Equal,
        3.0,
    ));
    let mut changes = 0usize;
    for &(a, b) in &TRIPLE_RINGS {
        let mut prev: Option<f64> = None;
        for i in 0..1000 {
            let r = a + (b - a) * (i + 1) as f64 / 1001.0;
            let d1 = psi_series(&params, r)?.d1;
            if let Some(p) = prev {
                if (p < 0.0) != (d1 < 0.0) {
                    changes += 1;
                }
            }
            prev = Some(d1);
        }
    }
    lines.push(Line::new("multi_annulus_slope_sign_changes/n=2", changes as f64, Relation::Equal, 3.0));
    Ok(lines)
}

pub const ORACLE_CONFIGS: usize = 10;
pub const ORACLE_SAMPLES: usize = 1 << 20;

/// Cartesian Monte Carlo against the spherical reduction, 10 configurations per family.
/// The worst value is `|cartesian - spherical| / max(1% of spherical, 3 sigma)`.
pub fn oracle(seed: u64) -> Result<Vec<Line>> {
    let mut lines = Vec::new();
    let families = ["ball", "ellipsoid", "polytope", "stadium", "multi_annulus"];
    for (fi, name) in families.iter().enumerate() {
        let mut rng = rng_for(seed, 11_000 + fi as u64);
        let mut worst: f64 = 0.0;
        for c in 0..ORACLE_CONFIGS {
            let n = if *name == "stadium" || c % 2 == 0 { 2 } else { 3 };
            let (dom, xi, reference) = if *name == "multi_annulus" {
                let (dom, xi) = random_multi_annulus(&mut rng, n, 0.1);
                let rule =
                    if n == 2 { SphericalRule::circle(1 << 16) } else { SphericalRule::sphere_product_with(400, 800) };
                let v = eval_psi_general(&dom, &xi, &rule)?;
                (dom, xi, v)
            } else {
                let family = Family::ALL[fi];
                let dom = random_domain(&mut rng, family, n);
                let xi = interior_point(&mut rng, &dom, 0.05);
                let v = psi(&dom, &xi, &rule_with_nodes(n, 1 << 16))?;
                (dom, xi, v)
            };
            let cfg = OracleConfig { r_out: None, samples: ORACLE_SAMPLES, seed: seed.wrapping_add(c as u64) };
            let est = psi_cartesian(&dom, &xi, &cfg)?;
            let scale = (0.01 * reference.abs()).max(3.0 * est.statistical_error);
            worst = worst.max((est.value - reference).abs() / scale);
        }
        lines.push(Line::new(format!("oracle_agreement/{name}"), worst, Relation::AtMost, 1.0));
    }
    Ok(lines)
}

pub const BALL_RADII: [f64; 3] = [0.5, 1.0, 3.0];

/// Closed-form center value `|S^(n-1)| R^(-n) / n`.
pub fn ball_center_value(n: usize, r: f64) -> f64 {
    let area = if n == 2 { 2.0 * PI } else { 4.0 * PI };
    area * r.powi(-(n as i32)) / n as f64
}

/// Rule for radial finite differences on a ball with the point on the last axis.
pub fn ball_axis_rule(n: usize) -> SphericalRule {
    if n == 2 {
        SphericalRule::circle(8192)
    } else {
        SphericalRule::sphere_product_with(400, 4)
    }
}

/// Worst relative gap between the radial-derivative formula and central differences of `psi`,
/// together with the smallest derivative seen, over radii `k R / 51`.
pub fn ball_monotonicity(n: usize, big_r: f64) -> Result<(f64, f64)> {
    let dom = Domain::ball(vec![0.0; n], big_r)?;
    let rule = ball_axis_rule(n);
    let h = 1e-5 * big_r;
    let (mut worst, mut smallest) = (0.0_f64, f64::INFINITY);
    for k in 1..=50 {
        let r = k as f64 * big_r / 51.0;
        let d = ball_radial_derivative(big_r, r, n, 24)?;
        let fd = (psi(&dom, &axis_point(n, r + h), &rule)? - psi(&dom, &axis_point(n, r - h), &rule)?) / (2.0 * h);
        worst = worst.max(rel(d, fd));
        smallest = smallest.min(d);
    }
    Ok((worst, smallest))
}

pub fn ball(seed: u64) -> Result<Vec<Line>> {
    let spec = FunctionalSpec::psi();
    let cfg = SolverConfig::default();
    let mut lines = Vec::new();
    for n in [2, 3] {
        let rule = default_rule(n);
        let (mut loc, mut agree, mut center) = (0.0_f64, 0.0_f64, 0.0_f64);
        for &r in &BALL_RADII {
            let dom = Domain::ball(vec![0.0; n], r)?;
            let single = minimize(&dom, &spec, &rule, &cfg)?;
            let audit = uniqueness_audit(&dom, &spec, &rule, &cfg, 20, seed)?;
            loc = loc.max(norm(&single.minimizer) / r).max(norm(&audit.minimizer) / r);
            agree = agree.max(audit.max_pairwise_start_disagreement / r);
            center = center.max(rel(psi(&dom, &vec![0.0; n], &rule)?, ball_center_value(n, r)));
        }
        lines.push(Line::new(format!("ball_minimizer_at_center/n={n}"), loc, Relation::AtMost, 1e-7));
        lines.push(Line::new(format!("ball_start_agreement/n={n}"), agree, Relation::AtMost, 1e-7));
        lines.push(Line::new(format!("ball_center_value/n={n}"), center, Relation::AtMost, 1e-10));
        let (mut worst, mut smallest) = (0.0_f64, f64::INFINITY);
        for &r in &BALL_RADII {
            let (w, s) = ball_monotonicity(n, r)?;
            worst = worst.max(w);
            smallest = smallest.min(s);
        }
        lines.push(Line::new(format!("ball_radial_derivative_positive/n={n}"), smallest, Relation::Above, 0.0));
        lines.push(Line::new(format!("ball_radial_derivative_vs_differences/n={n}"), worst, Relation::AtMost, 1e-4));
    }
    Ok(lines)
}

/// Origin-centered ellipsoids: `psi(-x) = psi(x)` with antipodally symmetric rules, and the
/// minimizer sits at the center.
pub fn symmetry(seed: u64) -> Result<Vec<Line>> {
    let spec = FunctionalSpec::psi();
    let cfg = SolverConfig::default();
    let mut lines = Vec::new();
    for n in [2, 3] {
        let mut rng = rng_for(seed, 12_000 + n as u64);
        let rule = default_rule(n);
        let mut worst: f64 = 0.0;
        let mut loc: f64 = 0.0;
        for i in 0..20 {
            let axes: Vec<f64> = (0..n).map(|_| 0.3 + 2.2 * rng.random::<f64>()).collect();
            let dom = Domain::ellipsoid(vec![0.0; n], axes)?;
            let x = interior_point(&mut rng, &dom, 0.02);
            let neg: Vec<f64> = x.iter().map(|v| -v).collect();
            let p = psi(&dom, &x, &rule)?;
            worst = worst.max((p - psi(&dom, &neg, &rule)?).abs() / p);
            if i % 4 == 0 {
                let report = minimize(&dom, &spec, &rule, &cfg)?;
                loc = loc.max(norm(&report.minimizer) / dom.diameter());
            }
        }
        lines.push(Line::new(format!("ellipsoid_antipodal_symmetry/n={n}"), worst, Relation::AtMost, 1e-9));
        lines.push(Line::new(format!("ellipsoid_minimizer_at_center/n={n}"), loc, Relation::AtMost, 1e-7));
    }
    Ok(lines)
}
