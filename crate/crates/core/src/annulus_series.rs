//! Gegenbauer-series evaluation of `psi` on concentric (multi-)annuli.
//!
//! Expanding `|x - r e_1|^(-2n)` in Gegenbauer polynomials `C_k^(n)` and integrating over
//! spheres gives, for a solid ball of radius `a` below `r` and the exterior of radius `b` above,
//!
//! ```text
//! psi(r) = sum_k A_k / (n + k) * (a^(n+k) / r^(2n+k) + r^k / b^(n+k))
//! ```
//!
//! with `A_k` the sphere integral of `C_k^(n)(cos theta)`. Multi-ring domains sum one such
//! pair per complement component: shells below `r` use the first form, shells above the
//! second, each with its own radius pair.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::geometry::validate_rings;
use crate::special::{beta_half, pochhammer_over_factorial, sphere_area};

/// Relative size of the first omitted term bound in automatic truncation.
const AUTO_TOLERANCE: f64 = 1e-14;
/// Upper limit on terms in automatic mode.
const MAX_TERMS: usize = 50_000_000;

/// `C_k^(lambda)(t)` by the forward three-term recurrence.
pub fn gegenbauer(k: usize, lambda: f64, t: f64) -> f64 {
    let mut c0 = 1.0;
    if k == 0 {
        return c0;
    }
    let mut c1 = 2.0 * lambda * t;
    for j in 1..k {
        let jf = j as f64;
        let c2 = (2.0 * (jf + lambda) * t * c1 - (jf + 2.0 * lambda - 1.0) * c0) / (jf + 1.0);
        c0 = c1;
        c1 = c2;
    }
    c1
}

/// `A_k`, the integral of `C_k^(n)(cos theta)` over `S^(n-1)`. Zero for odd `k`.
pub fn a_k(n: usize, k: usize) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    let m = k / 2;
    let nf = n as f64;
    sphere_area(n) * pochhammer_over_factorial(nf, m) * (1.0 + 2.0 * m as f64 / nf)
}

/// Closed forms of
/// `I_m = integral of C_2m^(n)(t) (1-t^2)^((n-3)/2)` and
/// `J_m = integral of t C_(2m+1)^(n)(t) (1-t^2)^((n-3)/2)` over `[-1, 1]`.
pub fn i_j_integrals(n: usize, m: usize) -> (f64, f64) {
    let (nf, mf) = (n as f64, m as f64);
    let common = beta_half(n) * pochhammer_over_factorial(nf, m);
    (common * (nf + 2.0 * mf) / nf, common * 2.0 * (nf + mf) / nf)
}

/// The same pair reached by the recurrence `(2m+2) I_(m+1) = 2(n+2m+1) J_m - (2n+2m) I_m`
/// from `I_0`, with `J_m = 2(m+n)/(2m+n) I_m` at each step.
pub fn i_j_recurrence(n: usize, m: usize) -> (f64, f64) {
    let nf = n as f64;
    let j_of = |i: f64, mf: f64| 2.0 * (mf + nf) / (2.0 * mf + nf) * i;
    let mut i = beta_half(n);
    for step in 0..m {
        let s = step as f64;
        let j = j_of(i, s);
        i = (2.0 * (nf + 2.0 * s + 1.0) * j - (2.0 * nf + 2.0 * s) * i) / (2.0 * s + 2.0);
    }
    (i, j_of(i, m as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    /// Stop once the growth bound `(2n)_K / K! q^K` drops below `1e-14` of the leading term.
    Auto,
    /// Use exactly this many terms `k = 0..K`.
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesParams {
    n: usize,
    rings: Vec<(f64, f64)>,
    truncation: Truncation,
}

impl SeriesParams {
    pub fn new(n: usize, rings: Vec<(f64, f64)>) -> Result<Self> {
        if n < 2 {
            return Err(Error::UnsupportedDimension { dimension: n, what: "annulus series" });
        }
        validate_rings(&rings)?;
        Ok(SeriesParams { n, rings, truncation: Truncation::Auto })
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rings(&self) -> &[(f64, f64)] {
        &self.rings
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    /// Scales every radius by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        let rings = self.rings.iter().map(|&(a, b)| (a * s, b * s)).collect();
        Ok(SeriesParams::new(self.n, rings)?.with_truncation(self.truncation))
    }

    pub fn ring_of(&self, r: f64) -> Option<usize> {
        self.rings.iter().position(|&(a, b)| a < r && r < b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesValue {
    pub psi: f64,
    pub d1: f64,
    pub d2: f64,
    /// Number of indices `k = 0..terms_used` summed.
    pub terms_used: usize,
    /// Bound on the omitted part of `psi`.
    pub tail_bound: f64,
}

/// One radius of one complement component seen from `r`: contributes
/// `sign * A_k/(n+k) * scale * base^k` to `psi`.
#[derive(Debug, Clone, Copy)]
struct Edge {
    base: f64,
    scale: f64,
    sign: f64,
    /// True for components below `r`, whose terms decay like `r^-(2n+k)`.
    inner: bool,
}

impl Edge {
    /// Factors turning the `psi` term into its first and second `r` derivatives.
    fn derivative_factors(&self, n: usize, k: usize, r: f64) -> (f64, f64) {
        let kf = k as f64;
        if self.inner {
            let p = (2 * n + k) as f64;
            (-p / r, p * (p + 1.0) / (r * r))
        } else {
            (kf / r, kf * (kf - 1.0) / (r * r))
        }
    }
}

fn edges(params: &SeriesParams, r: f64) -> Result<Vec<Edge>> {
    let ring = params.ring_of(r).ok_or(Error::RadiusOutsideRings(r))?;
    let n = params.n as i32;
    let rings = &params.rings;
    let mut out = Vec::new();
    // complement components: [0, a_1], [b_i, a_(i+1)], [b_m, inf)
    let mut push_inner = |x: f64, sign: f64| {
        if x > 0.0 {
            out.push(Edge { base: x / r, scale: x.powi(n) / r.powi(2 * n), sign, inner: true });
        }
    };
    push_inner(rings[0].0, 1.0);
    for i in 0..ring {
        push_inner(rings[i + 1].0, 1.0);
        push_inner(rings[i].1, -1.0);
    }
    for i in ring..rings.len() {
        let c = rings[i].1;
        out.push(Edge { base: r / c, scale: c.powi(-n), sign: 1.0, inner: false });
        if let Some(next) = rings.get(i + 1) {
            let d = next.0;
            out.push(Edge { base: r / d, scale: d.powi(-n), sign: -1.0, inner: false });
        }
    }
    Ok(out)
}

/// Iterates `(k, A_k / (n + k))` over even `k`.
struct Coefficients {
    n: f64,
    m: usize,
    a: f64,
}

impl Coefficients {
    fn new(n: usize) -> Self {
        Coefficients { n: n as f64, m: 0, a: sphere_area(n) }
    }

    fn next(&mut self) -> (usize, f64) {
        let (m, n) = (self.m as f64, self.n);
        let k = 2 * self.m;
        let out = (k, self.a / (n + k as f64));
        self.a *= (n + m) / (m + 1.0) * (n + 2.0 * m + 2.0) / (n + 2.0 * m);
        self.m += 1;
        out
    }
}

/// `base^k` through the logarithm, which keeps the relative error independent of `k`.
fn pow_k(base: f64, k: usize) -> f64 {
    if k == 0 {
        1.0
    } else {
        (k as f64 * base.ln()).exp()
    }
}

/// `(2n)_k / k! * base^k`, the growth bound of the `k`-th term relative to the leading one.
fn growth_bound(n: usize, k: usize, base: f64) -> f64 {
    let mut g = 1.0;
    for j in 0..k {
        g *= (2 * n + j) as f64 / (j + 1) as f64 * base;
    }
    g
}

/// Bound on `sum_(j >= k) (2n)_j/j! base^j (2n+j+1)^2`, or infinity if the ratio test has not
/// yet kicked in at `k`.
fn tail_from(n: usize, k: usize, base: f64, bound_k: f64) -> f64 {
    let poly = |j: usize| ((2 * n + j + 1) as f64).powi(2);
    let ratio = (2 * n + k) as f64 / (k + 1) as f64 * base * poly(k + 1) / poly(k);
    if ratio < 1.0 {
        bound_k * poly(k) / (1.0 - ratio)
    } else {
        f64::INFINITY
    }
}

/// `psi`, `psi'` and `psi''` at radius `r`.
pub fn psi_series(params: &SeriesParams, r: f64) -> Result<SeriesValue> {
    let n = params.n;
    let edges = edges(params, r)?;
    let area = sphere_area(n);
    let q = edges.iter().map(|e| e.base).fold(0.0, f64::max);
    let max_scale = edges.iter().map(|e| e.scale).fold(0.0, f64::max);
    let limit = match params.truncation {
        Truncation::Fixed(k) => k,
        Truncation::Auto => MAX_TERMS,
    };
    let mut coef = Coefficients::new(n);
    let (mut psi, mut d1, mut d2) = (0.0, 0.0, 0.0);
    let mut bound = 1.0;
    let mut bound_k = 0;
    let mut terms = 0;
    loop {
        let (k, c) = coef.next();
        if k >= limit {
            break;
        }
        if params.truncation == Truncation::Auto {
            bound *= growth_bound_step(n, bound_k, k, q);
            bound_k = k;
            let poly = ((2 * n + k + 1) as f64).powi(2);
            let ratio = (2 * n + k) as f64 / (k + 1) as f64 * q;
            if k > 0 && bound * poly < AUTO_TOLERANCE && ratio < 1.0 {
                break;
            }
        }
        for e in &edges {
            let t = e.sign * c * e.scale * pow_k(e.base, k);
            let (f1, f2) = e.derivative_factors(n, k, r);
            psi += t;
            d1 += t * f1;
            d2 += t * f2;
        }
        terms = k + 1;
    }
    let tail_bound = if terms == 0 {
        f64::INFINITY
    } else {
        let g = growth_bound(n, terms, q);
        edges.len() as f64 * area * max_scale * tail_from(n, terms, q, g)
    };
    Ok(SeriesValue { psi, d1, d2, terms_used: terms, tail_bound })
}

fn growth_bound_step(n: usize, from: usize, to: usize, base: f64) -> f64 {
    let mut g = 1.0;
    for j in from..to {
        g *= (2 * n + j) as f64 / (j + 1) as f64 * base;
    }
    g
}

/// Per-index summands of `psi''` at `r`, for `k = 0..count`.
pub fn second_derivative_terms(params: &SeriesParams, r: f64, count: usize) -> Result<Vec<f64>> {
    let n = params.n;
    let edges = edges(params, r)?;
    let mut coef = Coefficients::new(n);
    let mut out = vec![0.0; count];
    loop {
        let (k, c) = coef.next();
        if k >= count {
            break;
        }
        out[k] = edges
            .iter()
            .map(|e| {
                let (_, f2) = e.derivative_factors(n, k, r);
                e.sign * c * e.scale * pow_k(e.base, k) * f2
            })
            .sum();
    }
    Ok(out)
}

/// Sign of `psi'(r)` certified against bounds on the omitted terms. Returns `None` if the
/// budget runs out first; `Some(Equal)` when `psi'` is indistinguishable from zero.
fn certified_slope_sign(params: &SeriesParams, r: f64, budget: usize) -> Result<Option<Ordering>> {
    let n = params.n;
    let edges = edges(params, r)?;
    let area = sphere_area(n);
    let mut coef = Coefficients::new(n);
    // positive and negative partial sums of psi'
    let (mut pos, mut neg) = (0.0f64, 0.0f64);
    let mut growth: Vec<f64> = vec![1.0; edges.len()];
    let mut last_k = 0;
    loop {
        let (k, c) = coef.next();
        if k >= budget {
            return Ok(None);
        }
        for (e, g) in edges.iter().zip(growth.iter_mut()) {
            *g *= growth_bound_step(n, last_k, k, e.base);
            let (f1, _) = e.derivative_factors(n, k, r);
            let t = e.sign * c * e.scale * pow_k(e.base, k) * f1;
            if t > 0.0 {
                pos += t;
            } else {
                neg -= t;
            }
        }
        last_k = k;
        if k % 16 != 0 {
            continue;
        }
        // bounds on what remains on each side, from k + 1 on
        let (mut pos_tail, mut neg_tail) = (0.0, 0.0);
        for (e, g) in edges.iter().zip(&growth) {
            let next = g * growth_bound_step(n, k, k + 1, e.base);
            let t = area * e.scale * tail_from(n, k + 1, e.base, next) * (2 * n + k + 1) as f64 / r;
            let (f1, _) = e.derivative_factors(n, k + 2, r);
            if e.sign * f1 > 0.0 {
                pos_tail += t;
            } else {
                neg_tail += t;
            }
        }
        if pos > neg + neg_tail {
            return Ok(Some(Ordering::Greater));
        }
        if neg > pos + pos_tail {
            return Ok(Some(Ordering::Less));
        }
        if pos_tail + neg_tail <= 1e-15 * (pos + neg) {
            return Ok(Some(Ordering::Equal));
        }
    }
}

fn sign_budget(params: &SeriesParams) -> usize {
    match params.truncation {
        Truncation::Fixed(k) => k,
        Truncation::Auto => MAX_TERMS,
    }
}

/// One critical radius per ring: the root of `psi'`, which increases strictly across each ring.
pub fn critical_radii(params: &SeriesParams) -> Result<Vec<f64>> {
    let budget = sign_budget(params);
    let mut roots = Vec::with_capacity(params.rings.len());
    for (ring, &(a, b)) in params.rings.iter().enumerate() {
        let eps = 1e-9 * (b - a);
        let (mut lo, mut hi) = (a + eps, b - eps);
        let fail = Error::BracketSignFailure { ring };
        if certified_slope_sign(params, lo, budget)? != Some(Ordering::Less)
            || certified_slope_sign(params, hi, budget)? != Some(Ordering::Greater)
        {
            return Err(fail);
        }
        let tol = 1e-12;
        loop {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= tol || mid <= lo || mid >= hi {
                break;
            }
            match certified_slope_sign(params, mid, budget)? {
                Some(Ordering::Less) => lo = mid,
                Some(Ordering::Greater) => hi = mid,
                Some(Ordering::Equal) => {
                    lo = mid;
                    hi = mid;
                }
                None => return Err(fail),
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    Ok(roots)
}

/// Contribution of `{|x - center| >= b}` to `psi` at distance `r < b` from the center.
pub fn exterior_tail(n: usize, r: f64, b: f64) -> f64 {
    assert!(r >= 0.0 && r < b, "exterior tail needs 0 <= r < b");
    let n_i = n as i32;
    let base = r / b;
    let scale = b.powi(-n_i);
    let mut coef = Coefficients::new(n);
    let mut sum = 0.0;
    let mut bound = 1.0;
    let mut last = 0;
    loop {
        let (k, c) = coef.next();
        bound *= growth_bound_step(n, last, k, base);
        last = k;
        let ratio = (2 * n + k) as f64 / (k + 1) as f64 * base;
        if k > 0 && bound < 1e-17 && ratio < 1.0 {
            break;
        }
        sum += c * scale * pow_k(base, k);
        if k >= MAX_TERMS {
            break;
        }
    }
    sum
}
