//! Planar stadium: the convex hull of two disks of equal radius.

use crate::vecops::{dot, norm};

#[derive(Debug, Clone, PartialEq)]
pub struct Stadium {
    pub(crate) p: [f64; 2],
    pub(crate) q: [f64; 2],
    pub(crate) radius: f64,
}

fn circle_exit(center: &[f64; 2], radius: f64, xi: &[f64], w: &[f64]) -> Option<f64> {
    let d = [xi[0] - center[0], xi[1] - center[1]];
    let b = d[0] * w[0] + d[1] * w[1];
    let c = d[0] * d[0] + d[1] * d[1] - radius * radius;
    let disc = b * b - c;
    if disc <= 0.0 {
        return None;
    }
    let s = disc.sqrt();
    // far root, written without cancellation
    let t = if b > 0.0 { -c / (b + s) } else { s - b };
    (t > 0.0).then_some(t)
}

impl Stadium {
    pub fn endpoints(&self) -> ([f64; 2], [f64; 2]) {
        (self.p, self.q)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn axis(&self) -> ([f64; 2], f64) {
        let d = [self.q[0] - self.p[0], self.q[1] - self.p[1]];
        let len = norm(&d);
        if len == 0.0 {
            ([1.0, 0.0], 0.0)
        } else {
            ([d[0] / len, d[1] / len], len)
        }
    }

    pub(crate) fn segment_distance(&self, x: &[f64]) -> f64 {
        let (u, len) = self.axis();
        let rel = [x[0] - self.p[0], x[1] - self.p[1]];
        let s = dot(&rel, &u).clamp(0.0, len);
        let c = [self.p[0] + s * u[0], self.p[1] + s * u[1]];
        ((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2)).sqrt()
    }

    pub(crate) fn contains(&self, x: &[f64]) -> bool {
        self.segment_distance(x) < self.radius
    }

    pub(crate) fn boundary_distance(&self, x: &[f64]) -> f64 {
        (self.radius - self.segment_distance(x)).max(0.0)
    }

    pub(crate) fn diameter(&self) -> f64 {
        self.axis().1 + 2.0 * self.radius
    }

    /// The stadium is convex, so the ray leaves it at the farthest exit over its three convex
    /// pieces (two disks and the central rectangle).
    pub(crate) fn exit(&self, xi: &[f64], w: &[f64], normal: Option<&mut [f64]>) -> f64 {
        let (u, len) = self.axis();
        let nrm = [-u[1], u[0]];
        let mut best = (0.0_f64, [0.0_f64; 2]);

        for c in [&self.p, &self.q] {
            if let Some(t) = circle_exit(c, self.radius, xi, w) {
                if t > best.0 {
                    let y = [xi[0] + t * w[0] - c[0], xi[1] + t * w[1] - c[1]];
                    let l = norm(&y);
                    best = (t, [y[0] / l, y[1] / l]);
                }
            }
        }

        if len > 0.0 {
            let rel = [xi[0] - self.p[0], xi[1] - self.p[1]];
            let (s0, sw) = (dot(&rel, &u), dot(w, &u));
            let (h0, hw) = (dot(&rel, &nrm), dot(w, &nrm));
            let mut lo = f64::NEG_INFINITY;
            let mut hi = f64::INFINITY;
            let mut hi_normal = [0.0; 2];
            let mut clip = |start: f64, rate: f64, min: f64, max: f64, axis: [f64; 2]| {
                if rate == 0.0 {
                    if start <= min || start >= max {
                        lo = f64::INFINITY;
                    }
                    return;
                }
                let (t1, t2) = ((min - start) / rate, (max - start) / rate);
                let (enter, leave, sign) = if rate > 0.0 { (t1, t2, 1.0) } else { (t2, t1, -1.0) };
                lo = lo.max(enter);
                if leave < hi {
                    hi = leave;
                    hi_normal = [sign * axis[0], sign * axis[1]];
                }
            };
            clip(s0, sw, 0.0, len, u);
            clip(h0, hw, -self.radius, self.radius, nrm);
            if hi > lo.max(0.0) && hi > best.0 {
                best = (hi, hi_normal);
            }
        }

        if let Some(nu) = normal {
            nu[0] = best.1[0];
            nu[1] = best.1[1];
        }
        best.0
    }
}
