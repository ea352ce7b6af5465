//! Unions of concentric spherical shells `a_1 < |x - c| < b_1 < a_2 < ... < b_m`.

use crate::vecops::{dot, norm, sub};

#[derive(Debug, Clone, PartialEq)]
pub struct MultiAnnulus {
    pub(crate) center: Vec<f64>,
    pub(crate) rings: Vec<(f64, f64)>,
}

/// Both ray parameters where `|d + t w| = radius`, ascending, when the line crosses the sphere.
fn sphere_crossings(d: &[f64], w: &[f64], radius: f64) -> Option<(f64, f64)> {
    let b = dot(d, w);
    let c = dot(d, d) - radius * radius;
    let disc = b * b - c;
    if disc <= 0.0 {
        return None;
    }
    let s = disc.sqrt();
    let (lo, hi) = if b > 0.0 {
        let lo = -b - s;
        (lo, c / lo)
    } else {
        let hi = s - b;
        (if hi != 0.0 { c / hi } else { -b - s }, hi)
    };
    Some((lo.min(hi), lo.max(hi)))
}

impl MultiAnnulus {
    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn rings(&self) -> &[(f64, f64)] {
        &self.rings
    }

    fn radius_in_rings(&self, r: f64) -> Option<usize> {
        self.rings.iter().position(|&(a, b)| a < r && r < b)
    }

    pub(crate) fn contains(&self, x: &[f64]) -> bool {
        self.radius_in_rings(norm(&sub(x, &self.center))).is_some()
    }

    pub(crate) fn boundary_distance(&self, x: &[f64]) -> f64 {
        let r = norm(&sub(x, &self.center));
        match self.radius_in_rings(r) {
            Some(i) => (r - self.rings[i].0).min(self.rings[i].1 - r),
            None => 0.0,
        }
    }

    pub(crate) fn outer_radius(&self) -> f64 {
        self.rings.last().map_or(0.0, |r| r.1)
    }

    /// Visits the maximal intervals `[c, d)` of `t > 0` where `xi + t w` lies outside the domain,
    /// in increasing order. The last interval is unbounded.
    pub(crate) fn for_each_complement(&self, xi: &[f64], w: &[f64], mut visit: impl FnMut(f64, f64)) {
        let d = sub(xi, &self.center);
        let mut cuts: Vec<f64> = Vec::with_capacity(4 * self.rings.len() + 1);
        cuts.push(0.0);
        for &(a, b) in &self.rings {
            for radius in [a, b] {
                if let Some((t0, t1)) = sphere_crossings(&d, w, radius) {
                    cuts.extend([t0, t1].into_iter().filter(|t| *t > 0.0));
                }
            }
        }
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        cuts.dedup();

        let outside = |t: f64| {
            let r: f64 = d.iter().zip(w).map(|(di, wi)| (di + t * wi).powi(2)).sum::<f64>().sqrt();
            self.radius_in_rings(r).is_none()
        };

        let mut open: Option<f64> = None;
        for (k, &start) in cuts.iter().enumerate() {
            let end = cuts.get(k + 1).copied().unwrap_or(f64::INFINITY);
            let probe = if end.is_finite() { 0.5 * (start + end) } else { 2.0 * start + 1.0 + self.outer_radius() };
            match (outside(probe), open) {
                (true, None) => open = Some(start),
                (false, Some(c)) => {
                    visit(c, start);
                    open = None;
                }
                _ => {}
            }
        }
        if let Some(c) = open {
            visit(c, f64::INFINITY);
        }
    }
}
