//! Convex domains given only by a membership predicate.

use std::fmt;
use std::sync::Arc;

use crate::vecops::{add_scaled, norm};

pub type Predicate = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

#[derive(Clone)]
pub struct ImplicitDomain {
    pub(crate) dimension: usize,
    pub(crate) predicate: Predicate,
    pub(crate) interior_point: Vec<f64>,
    pub(crate) bounding_center: Vec<f64>,
    pub(crate) bounding_radius: f64,
}

impl fmt::Debug for ImplicitDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ImplicitDomain")
            .field("dimension", &self.dimension)
            .field("interior_point", &self.interior_point)
            .field("bounding_center", &self.bounding_center)
            .field("bounding_radius", &self.bounding_radius)
            .finish_non_exhaustive()
    }
}

impl PartialEq for ImplicitDomain {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.predicate, &other.predicate)
            && self.interior_point == other.interior_point
            && self.bounding_center == other.bounding_center
            && self.bounding_radius == other.bounding_radius
    }
}

impl ImplicitDomain {
    pub(crate) fn contains(&self, x: &[f64]) -> bool {
        (self.predicate)(x)
    }

    pub(crate) fn diameter_bound(&self) -> f64 {
        2.0 * self.bounding_radius
    }

    /// Bisection for the first exit on `[0, 2 diam]`; convexity makes membership along the ray
    /// a single interval.
    pub(crate) fn rho(&self, xi: &[f64], w: &[f64]) -> f64 {
        let diam = self.diameter_bound();
        let (mut lo, mut hi) = (0.0, 2.0 * diam);
        while hi - lo > 1e-12 * diam {
            let mid = 0.5 * (lo + hi);
            if self.contains(&add_scaled(xi, mid, w)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Normal recovered from `grad rho = -nu / (nu . w)` by central differences in `xi`.
    pub(crate) fn fd_normal(&self, xi: &[f64], w: &[f64], out: &mut [f64]) {
        let h = 1e-6 * self.diameter_bound();
        let mut grad = vec![0.0; xi.len()];
        let mut p = xi.to_vec();
        for k in 0..xi.len() {
            p[k] = xi[k] + h;
            let up = self.rho(&p, w);
            p[k] = xi[k] - h;
            let down = self.rho(&p, w);
            p[k] = xi[k];
            grad[k] = (up - down) / (2.0 * h);
        }
        let len = norm(&grad);
        for (o, g) in out.iter_mut().zip(&grad) {
            *o = -g / len;
        }
    }
}
