//! Value, gradient and Hessian of `Phi(xi) = integral over S^(n-1) of f(rho(xi, w)) dw`.
//!
//! With the default profile `f(t) = t^(-n) / n` this is `psi`.
//! Gradients use `grad rho = -nu / (nu . w)`; Hessians additionally need the derivative
//! of the normal field, which is known in closed form for balls and ellipsoids and vanishes
//! on polytope faces.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::{Domain, NormalDerivative};
use crate::sphere_quadrature::SphericalRule;
use crate::vecops::dot;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Points closer than this fraction of the diameter to the boundary are refused.
pub const BOUNDARY_GUARD: f64 = 1e-9;

#[derive(Clone)]
enum Profile {
    Psi,
    Power(f64),
    ExpDecay,
    Custom { f: ScalarFn, df: ScalarFn, d2f: Option<ScalarFn> },
}

/// The radial profile `f` with its derivatives.
#[derive(Clone)]
pub struct FunctionalSpec {
    label: String,
    profile: Profile,
}

impl fmt::Debug for FunctionalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionalSpec").field("label", &self.label).finish()
    }
}

impl FunctionalSpec {
    /// `f(t) = t^(-n) / n` with `n` taken from the domain, so `Phi = psi`.
    pub fn psi() -> Self {
        FunctionalSpec { label: "psi".into(), profile: Profile::Psi }
    }

    /// `f(t) = t^(-p) / p`.
    pub fn power(p: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidProfile(format!("power exponent must be positive, got {p}")));
        }
        Ok(FunctionalSpec { label: format!("power({p})"), profile: Profile::Power(p) })
    }

    /// `f(t) = exp(-t)`.
    pub fn exp_decay() -> Self {
        FunctionalSpec { label: "exp".into(), profile: Profile::ExpDecay }
    }

    /// A user profile. It is checked to be decreasing and convex on a log grid over `[1e-6, 1e6]`.
    pub fn custom<F, D, D2>(label: impl Into<String>, f: F, df: D, d2f: Option<D2>) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
        D2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let spec = FunctionalSpec {
            label: label.into(),
            profile: Profile::Custom { f: Arc::new(f), df: Arc::new(df), d2f: d2f.map(|g| Arc::new(g) as ScalarFn) },
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Parses `psi`, `exp` or `power:<p>`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "psi" => Ok(Self::psi()),
            "exp" => Ok(Self::exp_decay()),
            _ => match name.strip_prefix("power:").map(str::parse::<f64>) {
                Some(Ok(p)) => Self::power(p),
                _ => Err(Error::InvalidProfile(format!("unknown profile '{name}'"))),
            },
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_psi(&self) -> bool {
        matches!(self.profile, Profile::Psi)
    }

    pub fn f(&self, t: f64, n: usize) -> f64 {
        match &self.profile {
            Profile::Psi => t.powi(-(n as i32)) / n as f64,
            Profile::Power(p) => t.powf(-p) / p,
            Profile::ExpDecay => (-t).exp(),
            Profile::Custom { f, .. } => f(t),
        }
    }

    pub fn df(&self, t: f64, n: usize) -> f64 {
        match &self.profile {
            Profile::Psi => -t.powi(-(n as i32) - 1),
            Profile::Power(p) => -t.powf(-p - 1.0),
            Profile::ExpDecay => -(-t).exp(),
            Profile::Custom { df, .. } => df(t),
        }
    }

    pub fn d2f(&self, t: f64, n: usize) -> Option<f64> {
        match &self.profile {
            Profile::Psi => Some((n + 1) as f64 * t.powi(-(n as i32) - 2)),
            Profile::Power(p) => Some((p + 1.0) * t.powf(-p - 2.0)),
            Profile::ExpDecay => Some((-t).exp()),
            Profile::Custom { d2f, .. } => d2f.as_ref().map(|g| g(t)),
        }
    }

    /// Checks that `f` is decreasing and convex on a log grid of `[1e-6, 1e6]`.
    ///
    /// `f' <= 0` is required rather than `f' < 0` because profiles such as `exp(-t)` have
    /// derivatives that underflow to zero far out on the grid.
    pub fn validate(&self) -> Result<()> {
        const N: usize = 241;
        for n in [2usize, 3] {
            for i in 0..N {
                let t = 10f64.powf(-6.0 + 12.0 * i as f64 / (N - 1) as f64);
                let d = self.df(t, n);
                if !(d <= 0.0) {
                    return Err(Error::InvalidProfile(format!("{}: f'({t:e}) = {d:e} is not negative", self.label)));
                }
                match self.d2f(t, n) {
                    Some(c) => {
                        if !(c >= 0.0) {
                            return Err(Error::InvalidProfile(format!(
                                "{}: f''({t:e}) = {c:e} is negative",
                                self.label
                            )));
                        }
                    }
                    None => {
                        let h = 1e-3 * t;
                        let (a, b, c) = (self.f(t - h, n), self.f(t, n), self.f(t + h, n));
                        let scale = a.abs() + b.abs() + c.abs();
                        if a - 2.0 * b + c < -1e-12 * scale {
                            return Err(Error::InvalidProfile(format!("{}: f is not convex near {t:e}", self.label)));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Value, gradient and (where available) Hessian of `Phi` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub value: f64,
    pub gradient: Vec<f64>,
    /// Row-major `n x n`.
    pub hessian: Option<Vec<f64>>,
    /// `|I(2M) - I(M)|` for the value, with the refined rule doubling the resolution.
    pub quadrature_error_estimate: f64,
}

impl EvalResult {
    pub fn gradient_norm(&self) -> f64 {
        dot(&self.gradient, &self.gradient).sqrt()
    }

    pub fn hessian_matrix(&self) -> Option<DMatrix<f64>> {
        let n = self.gradient.len();
        self.hessian.as_ref().map(|h| DMatrix::from_row_slice(n, n, h))
    }
}

fn check_dims(dom: &Domain, xi: &[f64], rule: &SphericalRule) -> Result<()> {
    let n = dom.dimension();
    if xi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: xi.len() });
    }
    if rule.dimension() != n {
        return Err(Error::DimensionMismatch { expected: n, got: rule.dimension() });
    }
    Ok(())
}

/// Interior and near-boundary checks shared by every evaluation.
pub(crate) fn guard(dom: &Domain, xi: &[f64], rule: &SphericalRule) -> Result<()> {
    check_dims(dom, xi, rule)?;
    if !dom.contains(xi) {
        return Err(Error::PointNotInterior);
    }
    let guard = BOUNDARY_GUARD * dom.diameter();
    let distance = dom.boundary_distance(xi);
    if distance < guard {
        return Err(Error::TooCloseToBoundary { distance, guard });
    }
    Ok(())
}

/// `Phi(xi)` on a convex domain.
pub fn eval_phi(dom: &Domain, xi: &[f64], spec: &FunctionalSpec, rule: &SphericalRule) -> Result<f64> {
    if !dom.is_convex() {
        return Err(Error::NonConvexDomain);
    }
    guard(dom, xi, rule)?;
    let n = dom.dimension();
    rule.integrate(|w| spec.f(dom.exit_unchecked(xi, w, None), n))
}

/// `psi(xi)` from the full complement decomposition; valid on any supported domain.
pub fn eval_psi_general(dom: &Domain, xi: &[f64], rule: &SphericalRule) -> Result<f64> {
    guard(dom, xi, rule)?;
    let n = dom.dimension();
    let p = -(n as i32);
    let nf = n as f64;
    rule.integrate(|w| {
        let mut s = 0.0;
        dom.for_each_complement(xi, w, |c, d| {
            s += (c.powi(p) - if d.is_finite() { d.powi(p) } else { 0.0 }) / nf;
        });
        s
    })
}

/// `psi(xi)` by whichever route applies to the domain.
pub fn psi(dom: &Domain, xi: &[f64], rule: &SphericalRule) -> Result<f64> {
    if dom.is_convex() {
        eval_phi(dom, xi, &FunctionalSpec::psi(), rule)
    } else {
        eval_psi_general(dom, xi, rule)
    }
}

fn value_any(dom: &Domain, xi: &[f64], spec: &FunctionalSpec, rule: &SphericalRule) -> Result<f64> {
    if dom.is_convex() {
        eval_phi(dom, xi, spec, rule)
    } else if spec.is_psi() {
        eval_psi_general(dom, xi, rule)
    } else {
        Err(Error::NonConvexDomain)
    }
}

/// Gradient from the boundary normals: `integral of f'(rho) (-nu / (nu . w)) dw`.
pub fn grad_phi(dom: &Domain, xi: &[f64], spec: &FunctionalSpec, rule: &SphericalRule) -> Result<Vec<f64>> {
    if !dom.has_normals() {
        return Err(Error::NormalsUnavailable);
    }
    guard(dom, xi, rule)?;
    let n = dom.dimension();
    rule.integrate_vec(n, |w, out| {
        let rho = dom.exit_unchecked(xi, w, Some(out));
        let s = dot(out, w);
        let c = -spec.df(rho, n) / s;
        out.iter_mut().for_each(|v| *v *= c);
    })
}

/// Central-difference gradient with step `h` (default `1e-6 * diam`).
pub fn grad_fd(
    dom: &Domain,
    xi: &[f64],
    spec: &FunctionalSpec,
    rule: &SphericalRule,
    h: Option<f64>,
) -> Result<Vec<f64>> {
    guard(dom, xi, rule)?;
    let h = h.unwrap_or(1e-6 * dom.diameter());
    if !(h > 0.0) || dom.boundary_distance(xi) <= h {
        return Err(Error::StepExitsDomain { step: h });
    }
    let mut g = vec![0.0; xi.len()];
    let mut x = xi.to_vec();
    for k in 0..xi.len() {
        x[k] = xi[k] + h;
        let fp = value_any(dom, &x, spec, rule)?;
        x[k] = xi[k] - h;
        let fm = value_any(dom, &x, spec, rule)?;
        x[k] = xi[k];
        g[k] = (fp - fm) / (2.0 * h);
    }
    Ok(g)
}

/// Per-node value, gradient and Hessian contributions, packed as `[f, grad, hess]`.
fn node_terms(dom: &Domain, xi: &[f64], spec: &FunctionalSpec, w: &[f64], out: &mut [f64], with_hessian: bool) {
    let n = xi.len();
    let (head, rest) = out.split_at_mut(1);
    let (nu, hess) = rest.split_at_mut(n);
    let rho = dom.exit_unchecked(xi, w, Some(nu));
    let s = dot(nu, w);
    let d1 = spec.df(rho, n);
    head[0] = spec.f(rho, n);
    // grad rho = -nu / s
    let grad_rho: Vec<f64> = nu.iter().map(|v| -v / s).collect();
    if with_hessian {
        let d2 = spec.d2f(rho, n).unwrap_or(f64::NAN);
        for i in 0..n {
            for j in 0..n {
                hess[i * n + j] = d2 * grad_rho[i] * grad_rho[j];
            }
        }
        if let Some(NormalDerivative::Matrix(dny)) = {
            let y: Vec<f64> = xi.iter().zip(w).map(|(x, w)| x + rho * w).collect();
            dom.normal_derivative(&y, nu)
        } {
            // d nu / d xi = (d nu / d y)(I + w grad_rho^T)
            let mut e = vec![0.0; n * n];
            for i in 0..n {
                let dw: f64 = (0..n).map(|k| dny[i * n + k] * w[k]).sum();
                for j in 0..n {
                    e[i * n + j] = dny[i * n + j] + dw * grad_rho[j];
                }
            }
            // gradient of nu . w
            let ew: Vec<f64> = (0..n).map(|j| (0..n).map(|i| w[i] * e[i * n + j]).sum()).collect();
            for i in 0..n {
                for j in 0..n {
                    let h_rho = -e[i * n + j] / s + nu[i] * ew[j] / (s * s);
                    hess[i * n + j] += d1 * h_rho;
                }
            }
        }
    }
    for (g, gr) in nu.iter_mut().zip(&grad_rho) {
        *g = d1 * gr;
    }
}

fn hessian_supported(dom: &Domain, spec: &FunctionalSpec) -> bool {
    matches!(dom, Domain::Ball(_) | Domain::Ellipsoid(_) | Domain::Polytope(_)) && spec.d2f(1.0, 2).is_some()
}

fn symmetrize(h: &mut [f64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            let m = 0.5 * (h[i * n + j] + h[j * n + i]);
            h[i * n + j] = m;
            h[j * n + i] = m;
        }
    }
}

/// Analytic Hessian of `Phi`. Balls and ellipsoids use the full curvature term; on polytopes
/// `rho` is affine in `xi` on each face's preimage, so only the rank-one term remains.
pub fn hessian_phi(dom: &Domain, xi: &[f64], spec: &FunctionalSpec, rule: &SphericalRule) -> Result<Vec<f64>> {
    if !hessian_supported(dom, spec) {
        return Err(Error::HessianUnavailable);
    }
    guard(dom, xi, rule)?;
    let n = dom.dimension();
    let mut h = rule.integrate_vec(1 + n + n * n, |w, out| node_terms(dom, xi, spec, w, out, true))?.split_off(1 + n);
    symmetrize(&mut h, n);
    Ok(h)
}

/// Value, gradient and Hessian in a single pass over the nodes, with gradient and Hessian
/// falling back to finite differences or omitted where the domain lacks normals or curvature.
/// The value is also computed on the refined rule for the error estimate.
pub fn evaluate(
    dom: &Domain,
    xi: &[f64],
    spec: &FunctionalSpec,
    rule: &SphericalRule,
    with_hessian: bool,
) -> Result<EvalResult> {
    let mut res = evaluate_core(dom, xi, spec, rule, with_hessian)?;
    let fine = value_any(dom, xi, spec, &rule.refined())?;
    res.quadrature_error_estimate = (fine - res.value).abs();
    Ok(res)
}

/// [`evaluate`] without the refined-rule error estimate (reported as NaN).
pub fn evaluate_core(
    dom: &Domain,
    xi: &[f64],
    spec: &FunctionalSpec,
    rule: &SphericalRule,
    with_hessian: bool,
) -> Result<EvalResult> {
    guard(dom, xi, rule)?;
    let n = dom.dimension();
    if !dom.has_normals() {
        let value = value_any(dom, xi, spec, rule)?;
        let gradient = grad_fd(dom, xi, spec, rule, None)?;
        return Ok(EvalResult { value, gradient, hessian: None, quadrature_error_estimate: f64::NAN });
    }
    let with_hessian = with_hessian && hessian_supported(dom, spec);
    let width = 1 + n + if with_hessian { n * n } else { 0 };
    let mut sums = rule.integrate_vec(width, |w, out| node_terms(dom, xi, spec, w, out, with_hessian))?;
    let hessian = if with_hessian {
        let mut h = sums.split_off(1 + n);
        symmetrize(&mut h, n);
        Some(h)
    } else {
        None
    };
    let gradient = sums.split_off(1);
    Ok(EvalResult { value: sums[0], gradient, hessian, quadrature_error_estimate: f64::NAN })
}
