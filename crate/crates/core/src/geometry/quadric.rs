//! Balls and axis-aligned ellipsoids.

use crate::vecops::{dot, norm, sub};

/// Exit parameter of the ray `d + t w` from the ellipsoid `sum (x_i/a_i)^2 < 1`, where `d` is
/// already relative to the center and scaled by the semi-axes (`u = d/a`, `v = w/a`).
/// Requires `|u| < 1`, so the constant term is negative and the positive root is unique.
#[inline]
fn positive_root(a: f64, b: f64, c: f64) -> f64 {
    // a t^2 + 2 b t + c = 0 with a > 0, c < 0
    let s = (b * b - a * c).max(0.0).sqrt();
    if b > 0.0 {
        -c / (b + s)
    } else {
        (s - b) / a
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub(crate) center: Vec<f64>,
    pub(crate) radius: f64,
}

impl Ball {
    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub(crate) fn contains(&self, x: &[f64]) -> bool {
        let d = sub(x, &self.center);
        dot(&d, &d) < self.radius * self.radius
    }

    pub(crate) fn exit(&self, xi: &[f64], w: &[f64], normal: Option<&mut [f64]>) -> f64 {
        let d = sub(xi, &self.center);
        let b = dot(&d, w);
        let c = dot(&d, &d) - self.radius * self.radius;
        let t = positive_root(1.0, b, c);
        if let Some(nu) = normal {
            for i in 0..d.len() {
                nu[i] = (d[i] + t * w[i]) / self.radius;
            }
            let len = norm(nu);
            nu.iter_mut().for_each(|v| *v /= len);
        }
        t
    }

    pub(crate) fn boundary_distance(&self, x: &[f64]) -> f64 {
        self.radius - norm(&sub(x, &self.center))
    }

    /// Derivative of the outward normal field at a boundary point, row-major `n x n`.
    pub(crate) fn normal_derivative(&self, nu: &[f64]) -> Vec<f64> {
        let n = nu.len();
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let delta = if i == j { 1.0 } else { 0.0 };
                m[i * n + j] = (delta - nu[i] * nu[j]) / self.radius;
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    pub(crate) center: Vec<f64>,
    pub(crate) semi_axes: Vec<f64>,
}

impl Ellipsoid {
    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn semi_axes(&self) -> &[f64] {
        &self.semi_axes
    }

    pub(crate) fn contains(&self, x: &[f64]) -> bool {
        let s: f64 = x.iter().zip(&self.center).zip(&self.semi_axes).map(|((xi, c), a)| ((xi - c) / a).powi(2)).sum();
        s < 1.0
    }

    pub(crate) fn exit(&self, xi: &[f64], w: &[f64], normal: Option<&mut [f64]>) -> f64 {
        let n = xi.len();
        let (mut a, mut b, mut c) = (0.0, 0.0, -1.0);
        for i in 0..n {
            let u = (xi[i] - self.center[i]) / self.semi_axes[i];
            let v = w[i] / self.semi_axes[i];
            a += v * v;
            b += u * v;
            c += u * u;
        }
        let t = positive_root(a, b, c);
        if let Some(nu) = normal {
            for i in 0..n {
                let y = xi[i] + t * w[i] - self.center[i];
                nu[i] = y / (self.semi_axes[i] * self.semi_axes[i]);
            }
            let len = norm(nu);
            nu.iter_mut().for_each(|v| *v /= len);
        }
        t
    }

    /// `(I - nu nu^T) Q / |Q (y - c)|` with `Q = diag(a_i^-2)`.
    pub(crate) fn normal_derivative(&self, y: &[f64], nu: &[f64]) -> Vec<f64> {
        let n = nu.len();
        let g: Vec<f64> = (0..n).map(|i| (y[i] - self.center[i]) / (self.semi_axes[i] * self.semi_axes[i])).collect();
        let scale = norm(&g);
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let delta = if i == j { 1.0 } else { 0.0 };
                m[i * n + j] = (delta - nu[i] * nu[j]) / (self.semi_axes[j] * self.semi_axes[j]) / scale;
            }
        }
        m
    }

    /// Euclidean distance from an interior point to the ellipsoid surface.
    ///
    /// The nearest boundary point is `x_i = a_i^2 y_i / (t + a_i^2)` where `t` is the root of
    /// `sum (a_i y_i / (t + a_i^2))^2 = 1` on `(-a_min^2, 0]`, found by bisection. When the
    /// point has no component along the shortest axes the root may sit on the pole, which is
    /// handled separately.
    pub(crate) fn boundary_distance(&self, x: &[f64]) -> f64 {
        if !self.contains(x) {
            return 0.0;
        }
        let y: Vec<f64> = x.iter().zip(&self.center).map(|(a, b)| (a - b).abs()).collect();
        let e = &self.semi_axes;
        let emin = e.iter().cloned().fold(f64::INFINITY, f64::min);
        let on_min: Vec<bool> = e.iter().map(|&a| a == emin).collect();
        let pole_active = y.iter().zip(&on_min).any(|(&yi, &m)| m && yi > 0.0);

        let f = |t: f64| -> f64 {
            y.iter().zip(e).map(|(&yi, &a)| if yi == 0.0 { 0.0 } else { (a * yi / (t + a * a)).powi(2) }).sum::<f64>()
                - 1.0
        };
        let nearest = |t: f64| -> f64 {
            y.iter()
                .zip(e)
                .map(|(&yi, &a)| {
                    let xi = if yi == 0.0 { 0.0 } else { a * a * yi / (t + a * a) };
                    (xi - yi).powi(2)
                })
                .sum::<f64>()
                .sqrt()
        };

        if !pole_active {
            // Components along the shortest axes vanish; check whether the root escapes the pole.
            let h: f64 = y
                .iter()
                .zip(e)
                .zip(&on_min)
                .filter(|(_, &m)| !m)
                .map(|((&yi, &a), _)| (a * yi / (a * a - emin * emin)).powi(2))
                .sum();
            if h < 1.0 {
                let mut d2 = 0.0;
                for i in 0..y.len() {
                    if !on_min[i] {
                        let xi = e[i] * e[i] * y[i] / (e[i] * e[i] - emin * emin);
                        d2 += (xi - y[i]).powi(2);
                    }
                }
                d2 += emin * emin * (1.0 - h);
                return d2.sqrt();
            }
        }

        let (mut lo, mut hi) = (-emin * emin, 0.0_f64);
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        nearest(0.5 * (lo + hi))
    }
}
