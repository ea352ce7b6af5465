//! Brute-force checks that do not go through the spherical reduction.
//!
//! [`psi_cartesian`] integrates `|x - xi|^(-2n)` over the complement of the domain directly,
//! sampling in polar coordinates around `xi`: the radius is drawn with density proportional to
//! `s^(-n-1)`, which cancels the Jacobian and the kernel, so every sample only asks whether
//! `xi + s u` lies outside the domain. The radial quantile range is split into equal strata,
//! each with its own random stream.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::annulus_series::exterior_tail;
use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::special::sphere_area;
use crate::sphere_quadrature::gauss_legendre;
use crate::vecops::{distance, pairwise_sum};

const STRATA: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    /// Cutoff radius around the bounding-ball center; defaults to four bounding radii.
    pub r_out: Option<f64>,
    pub samples: usize,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { r_out: None, samples: 1 << 20, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleEstimate {
    pub value: f64,
    /// One standard deviation of the Monte Carlo part.
    pub statistical_error: f64,
    /// Exact contribution of everything beyond the cutoff.
    pub tail: f64,
    pub r_out: f64,
    pub samples: usize,
}

impl OracleEstimate {
    /// Whether `reference` lies within `max(rel * |value|, 3 sigma)`.
    pub fn agrees_with(&self, reference: f64, rel: f64) -> bool {
        (self.value - reference).abs() <= (rel * self.value.abs()).max(3.0 * self.statistical_error)
    }
}

fn random_direction<R: Rng>(rng: &mut R, out: &mut [f64]) {
    loop {
        for v in out.iter_mut() {
            *v = StandardNormal.sample(rng);
        }
        let len = out.iter().map(|v| v * v).sum::<f64>().sqrt();
        if len > 1e-12 {
            out.iter_mut().for_each(|v| *v /= len);
            return;
        }
    }
}

/// Cartesian Monte Carlo estimate of `psi(xi)`.
pub fn psi_cartesian(dom: &Domain, xi: &[f64], cfg: &OracleConfig) -> Result<OracleEstimate> {
    let n = dom.dimension();
    if xi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: xi.len() });
    }
    if !dom.contains(xi) {
        return Err(Error::PointNotInterior);
    }
    if cfg.samples < STRATA {
        return Err(Error::InvalidArgument(format!("need at least {STRATA} samples")));
    }
    let (center, bounding_radius) = dom.bounding_ball();
    let r_out = cfg.r_out.unwrap_or(4.0 * bounding_radius);
    let required = 2.0 * bounding_radius;
    if !(r_out >= required) {
        return Err(Error::CutoffTooSmall { r_out, required });
    }
    let offset = distance(xi, &center);
    // no complement point is closer than the boundary distance; the implicit shape only
    // provides an upper bound for it
    let mut s_min = dom.boundary_distance(xi);
    if matches!(dom, Domain::Implicit(_)) {
        s_min *= 0.5;
    }
    let s_max = r_out + offset;
    let nf = n as f64;
    let lo = s_min.powf(-nf);
    let hi = s_max.powf(-nf);
    let z = (lo - hi) / nf;
    let per = cfg.samples.div_ceil(STRATA);

    let strata: Vec<(f64, f64)> = (0..STRATA)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(k as u64);
            let mut u = vec![0.0; n];
            let mut x = vec![0.0; n];
            let mut hits = 0usize;
            for _ in 0..per {
                let q = (k as f64 + rng.random::<f64>()) / STRATA as f64;
                // inverse CDF of s^(-n-1) on [s_min, s_max]
                let s = (lo - q * (lo - hi)).powf(-1.0 / nf);
                random_direction(&mut rng, &mut u);
                for i in 0..n {
                    x[i] = xi[i] + s * u[i];
                }
                if !dom.contains(&x) && distance(&x, &center) < r_out {
                    hits += 1;
                }
            }
            let p = hits as f64 / per as f64;
            (p, p * (1.0 - p) / (per as f64 - 1.0).max(1.0))
        })
        .collect();
    let scale = sphere_area(n) * z / STRATA as f64;
    let means: Vec<f64> = strata.iter().map(|s| s.0).collect();
    let vars: Vec<f64> = strata.iter().map(|s| s.1).collect();
    let body = scale * pairwise_sum(&means);
    let sigma = scale * pairwise_sum(&vars).sqrt();
    let tail = exterior_tail(n, offset, r_out);
    Ok(OracleEstimate { value: body + tail, statistical_error: sigma, tail, r_out, samples: per * STRATA })
}

/// Integrand of the radial derivative of `psi` on the ball of radius `big_r` at distance `r`
/// from the center, as a function of `s = |x'|`:
/// `((a - r)^2 + s^2)^(-n) - ((a + r)^2 + s^2)^(-n)` with `a = sqrt(R^2 - s^2)`.
pub fn ball_derivative_integrand(big_r: f64, r: f64, n: usize, s: f64) -> f64 {
    let a = (big_r * big_r - s * s).max(0.0).sqrt();
    let s2 = s * s;
    let p = -(n as i32);
    ((a - r).powi(2) + s2).powi(p) - ((a + r).powi(2) + s2).powi(p)
}

/// `psi'(r)` on the ball of radius `big_r` in dimension 2 or 3, by quadrature over the
/// hyperplane section `|x'| <= R`.
///
/// With `s = R sin(phi)` the integrand is smooth in `phi` but sharply peaked near `phi = 0`
/// when `r` approaches `R`; panels are refined geometrically towards that point, with
/// `points_per_panel` Gauss-Legendre nodes each.
pub fn ball_radial_derivative(big_r: f64, r: f64, n: usize, points_per_panel: usize) -> Result<f64> {
    if !(big_r > 0.0) || !(r >= 0.0 && r < big_r) {
        return Err(Error::InvalidArgument(format!("need 0 <= r < R, got r = {r}, R = {big_r}")));
    }
    if n != 2 && n != 3 {
        return Err(Error::UnsupportedDimension { dimension: n, what: "ball radial derivative" });
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let (t, w) = gauss_legendre(points_per_panel.max(2));
    let width = ((big_r - r) / big_r).max(1e-300);
    let mut edges = vec![0.0];
    let mut e = 1e-3 * width;
    while e < PI / 2.0 {
        edges.push(e);
        e *= 2.0;
    }
    edges.push(PI / 2.0);
    let mut panels = Vec::with_capacity(edges.len());
    for pair in edges.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let vals: Vec<f64> = t
            .iter()
            .zip(&w)
            .map(|(ti, wi)| {
                let phi = mid + half * ti;
                let s = big_r * phi.sin();
                let jac = big_r * phi.cos();
                let f = ball_derivative_integrand(big_r, r, n, s) * jac;
                // n = 2 integrates over [-R, R] (even integrand), n = 3 over a disk
                wi * half * if n == 2 { 2.0 * f } else { 2.0 * PI * s * f }
            })
            .collect();
        panels.push(pairwise_sum(&vals));
    }
    Ok(pairwise_sum(&panels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annulus_series::{psi_series, SeriesParams};

    #[test]
    fn ball_center_value() {
        let b = Domain::ball([0.0, 0.0], 1.0).unwrap();
        let cfg = OracleConfig { r_out: Some(10.0), samples: 1 << 18, seed: 1 };
        let est = psi_cartesian(&b, &[0.0, 0.0], &cfg).unwrap();
        assert!(est.agrees_with(PI, 0.01), "{est:?}");
    }

    #[test]
    fn annulus_matches_series() {
        let ann = Domain::multi_annulus([0.0, 0.0], vec![(1.0, 2.0)]).unwrap();
        let est = psi_cartesian(&ann, &[1.5, 0.0], &OracleConfig::default()).unwrap();
        let series = psi_series(&SeriesParams::new(2, vec![(1.0, 2.0)]).unwrap(), 1.5).unwrap().psi;
        assert!((est.value - series).abs() < 0.01 * series, "{} vs {series}", est.value);
    }

    #[test]
    fn cutoff_check() {
        let b = Domain::ball([0.0, 0.0], 1.0).unwrap();
        let cfg = OracleConfig { r_out: Some(1.5), ..OracleConfig::default() };
        assert_eq!(
            psi_cartesian(&b, &[0.0, 0.0], &cfg).unwrap_err(),
            Error::CutoffTooSmall { r_out: 1.5, required: 2.0 }
        );
    }

    #[test]
    fn estimates_are_reproducible() {
        let sq = Domain::axis_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let cfg = OracleConfig { samples: 1 << 14, ..OracleConfig::default() };
        let a = psi_cartesian(&sq, &[0.3, 0.4], &cfg).unwrap();
        let b = psi_cartesian(&sq, &[0.3, 0.4], &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ball_derivative_basics() {
        assert_eq!(ball_radial_derivative(1.0, 0.0, 2, 16).unwrap(), 0.0);
        assert!(ball_radial_derivative(1.0, 0.5, 2, 16).unwrap() > 0.0);
        assert!(ball_radial_derivative(1.0, 0.5, 3, 16).unwrap() > 0.0);
        for k in 0..=100 {
            let s = k as f64 / 100.0;
            assert!(ball_derivative_integrand(1.0, 0.3, 2, s) >= 0.0);
        }
        // converged in the panel size
        let a = ball_radial_derivative(1.0, 0.99, 3, 16).unwrap();
        let b = ball_radial_derivative(1.0, 0.99, 3, 32).unwrap();
        assert!((a - b).abs() < 1e-12 * a.abs());
    }
}
