//! Python bindings: domains, sphere rules, evaluation, the critical-point solver, the annulus
//! series and the Cartesian oracle.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use psikit_core::annulus_series::{self, SeriesParams, Truncation};
use psikit_core::geometry::Halfspace;
use psikit_core::oracle::{self, OracleConfig};
use psikit_core::{functional, solver, sphere_quadrature};
use psikit_core::{CriticalPointReport, Domain, Error, FunctionalSpec, SolverConfig, SphericalRule, UnitDirection};

create_exception!(psikit, PsikitError, PyRuntimeError, "Base class for numerical failures.");
create_exception!(psikit, NotInteriorError, PsikitError, "The point is not inside the domain.");
create_exception!(psikit, NumericalError, PsikitError, "A numerical procedure failed.");
create_exception!(psikit, DisagreementError, PsikitError, "Multi-start minimizers disagree.");

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::PointNotInterior | Error::TooCloseToBoundary { .. } | Error::StepExitsDomain { .. } => {
            NotInteriorError::new_err(msg)
        }
        Error::DisagreementExceedsTolerance { .. } => DisagreementError::new_err(msg),
        Error::NormalsUnavailable
        | Error::HessianUnavailable
        | Error::NonFiniteSample { .. }
        | Error::BracketSignFailure { .. }
        | Error::MaxIterations(_)
        | Error::LineSearchStall { .. } => NumericalError::new_err(msg),
        _ => PyValueError::new_err(msg),
    }
}

trait IntoPyResult<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPyResult<T> for psikit_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

#[pyclass(name = "Domain", module = "psikit", frozen)]
struct PyDomain {
    inner: Domain,
}

fn wrap(d: psikit_core::Result<Domain>) -> PyResult<PyDomain> {
    d.py().map(|inner| PyDomain { inner })
}

fn direction(w: Vec<f64>) -> PyResult<UnitDirection> {
    UnitDirection::new(w).py()
}

#[pymethods]
impl PyDomain {
    #[staticmethod]
    fn ball(center: Vec<f64>, radius: f64) -> PyResult<Self> {
        wrap(Domain::ball(center, radius))
    }

    #[staticmethod]
    fn ellipsoid(center: Vec<f64>, semi_axes: Vec<f64>) -> PyResult<Self> {
        wrap(Domain::ellipsoid(center, semi_axes))
    }

    /// Intersection of `{x : a_i . x < b_i}` for rows `a_i` of `normals`.
    #[staticmethod]
    fn polytope(normals: Vec<Vec<f64>>, offsets: Vec<f64>) -> PyResult<Self> {
        if normals.len() != offsets.len() {
            return Err(PyValueError::new_err("normals and offsets differ in length"));
        }
        let hs = normals.into_iter().zip(offsets).map(|(normal, offset)| Halfspace { normal, offset }).collect();
        wrap(Domain::polytope(hs))
    }

    #[staticmethod]
    #[pyo3(name = "box")]
    fn axis_box(lo: Vec<f64>, hi: Vec<f64>) -> PyResult<Self> {
        wrap(Domain::axis_box(&lo, &hi))
    }

    #[staticmethod]
    #[pyo3(signature = (center, circumradius, sides, rotation = 0.0))]
    fn regular_polygon(center: [f64; 2], circumradius: f64, sides: usize, rotation: f64) -> PyResult<Self> {
        wrap(Domain::regular_polygon(center, circumradius, sides, rotation))
    }

    #[staticmethod]
    fn stadium(p: [f64; 2], q: [f64; 2], radius: f64) -> PyResult<Self> {
        wrap(Domain::stadium(p, q, radius))
    }

    #[staticmethod]
    fn multi_annulus(center: Vec<f64>, rings: Vec<(f64, f64)>) -> PyResult<Self> {
        wrap(Domain::multi_annulus(center, rings))
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    #[getter]
    fn shape(&self) -> &'static str {
        self.inner.shape_name()
    }

    #[getter]
    fn is_convex(&self) -> bool {
        self.inner.is_convex()
    }

    #[getter]
    fn diameter(&self) -> f64 {
        self.inner.diameter()
    }

    fn contains(&self, x: Vec<f64>) -> bool {
        self.inner.contains(&x)
    }

    fn rho(&self, xi: Vec<f64>, w: Vec<f64>) -> PyResult<f64> {
        self.inner.rho(&xi, &direction(w)?).py()
    }

    /// `(rho, outward normal)` at the first boundary crossing.
    fn ray_exit(&self, xi: Vec<f64>, w: Vec<f64>) -> PyResult<(f64, Vec<f64>)> {
        let e = self.inner.ray_exit(&xi, &direction(w)?).py()?;
        Ok((e.rho, e.normal))
    }

    fn complement_intervals(&self, xi: Vec<f64>, w: Vec<f64>) -> PyResult<Vec<(f64, f64)>> {
        Ok(self.inner.complement_intervals(&xi, &direction(w)?).py()?.intervals().to_vec())
    }

    fn boundary_distance(&self, x: Vec<f64>) -> f64 {
        self.inner.boundary_distance(&x)
    }

    fn translated(&self, shift: Vec<f64>) -> PyResult<Self> {
        wrap(self.inner.translated(&shift))
    }

    fn __repr__(&self) -> String {
        format!("Domain({}, n={})", self.inner.shape_name(), self.inner.dimension())
    }
}

#[pyclass(name = "SphericalRule", module = "psikit", frozen)]
struct PyRule {
    inner: SphericalRule,
}

#[pymethods]
impl PyRule {
    /// `m` equispaced directions on the circle.
    #[staticmethod]
    fn circle(m: usize) -> Self {
        PyRule { inner: SphericalRule::circle(m) }
    }

    /// Gauss-Legendre in `cos(theta)` times uniform azimuth on the 2-sphere.
    #[staticmethod]
    fn product(polar: usize, azimuth: usize) -> Self {
        PyRule { inner: SphericalRule::sphere_product_with(polar, azimuth) }
    }

    #[staticmethod]
    #[pyo3(signature = (n, degree, seed = 0))]
    fn for_dimension(n: usize, degree: usize, seed: u64) -> PyResult<Self> {
        Ok(PyRule { inner: SphericalRule::for_dimension(n, degree, seed).py()? })
    }

    #[staticmethod]
    #[pyo3(signature = (n, samples, seed = 0))]
    fn monte_carlo(n: usize, samples: usize, seed: u64) -> PyResult<Self> {
        Ok(PyRule { inner: SphericalRule::monte_carlo(n, samples, seed).py()? })
    }

    fn refined(&self) -> Self {
        PyRule { inner: self.inner.refined() }
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn nodes(&self) -> Vec<Vec<f64>> {
        self.inner.nodes().map(<[f64]>::to_vec).collect()
    }

    fn weights(&self) -> Vec<f64> {
        self.inner.weights().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("SphericalRule(n={}, nodes={})", self.inner.dimension(), self.inner.len())
    }
}

#[pyclass(name = "Functional", module = "psikit", frozen)]
struct PyFunctional {
    inner: FunctionalSpec,
}

#[pymethods]
impl PyFunctional {
    /// `f(t) = t^-n / n`, so that `Phi = psi`.
    #[staticmethod]
    fn psi() -> Self {
        PyFunctional { inner: FunctionalSpec::psi() }
    }

    #[staticmethod]
    fn power(p: f64) -> PyResult<Self> {
        Ok(PyFunctional { inner: FunctionalSpec::power(p).py()? })
    }

    #[staticmethod]
    fn exp_decay() -> Self {
        PyFunctional { inner: FunctionalSpec::exp_decay() }
    }

    /// `"psi"`, `"exp"` or `"power:<p>"`.
    #[staticmethod]
    fn by_name(name: &str) -> PyResult<Self> {
        Ok(PyFunctional { inner: FunctionalSpec::by_name(name).py()? })
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_string()
    }
}

fn spec_of(f: Option<&PyFunctional>) -> FunctionalSpec {
    f.map(|f| f.inner.clone()).unwrap_or_else(FunctionalSpec::psi)
}

#[pyfunction]
fn psi(domain: &PyDomain, xi: Vec<f64>, rule: &PyRule) -> PyResult<f64> {
    functional::psi(&domain.inner, &xi, &rule.inner).py()
}

/// Value, gradient, optional Hessian (row lists) and a refinement-based quadrature error.
#[pyfunction]
#[pyo3(signature = (domain, xi, rule, functional = None, hessian = true))]
fn evaluate<'py>(
    py: Python<'py>,
    domain: &PyDomain,
    xi: Vec<f64>,
    rule: &PyRule,
    functional: Option<&PyFunctional>,
    hessian: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let spec = spec_of(functional);
    let r = functional::evaluate(&domain.inner, &xi, &spec, &rule.inner, hessian).py()?;
    let n = xi.len();
    let d = PyDict::new(py);
    d.set_item("value", r.value)?;
    d.set_item("gradient_norm", r.gradient_norm())?;
    d.set_item("gradient", r.gradient)?;
    d.set_item("hessian", r.hessian.map(|h| h.chunks(n).map(<[f64]>::to_vec).collect::<Vec<_>>()))?;
    d.set_item("quadrature_error", r.quadrature_error_estimate)?;
    Ok(d)
}

/// Central-difference gradient of the discretized functional.
#[pyfunction]
#[pyo3(signature = (domain, xi, rule, functional = None, h = None))]
fn grad_fd(
    domain: &PyDomain,
    xi: Vec<f64>,
    rule: &PyRule,
    functional: Option<&PyFunctional>,
    h: Option<f64>,
) -> PyResult<Vec<f64>> {
    functional::grad_fd(&domain.inner, &xi, &spec_of(functional), &rule.inner, h).py()
}

fn report_dict<'py>(py: Python<'py>, r: CriticalPointReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("minimizer", r.minimizer)?;
    d.set_item("value", r.value)?;
    d.set_item("gradient_norm", r.gradient_norm)?;
    d.set_item("gradient_tolerance", r.gradient_tolerance)?;
    d.set_item("iterations", r.iterations)?;
    d.set_item("starts_used", r.starts_used)?;
    d.set_item("max_pairwise_start_disagreement", r.max_pairwise_start_disagreement)?;
    d.set_item("termination", format!("{:?}", r.termination))?;
    d.set_item("history", r.history)?;
    Ok(d)
}

fn solver_config(gradient_tolerance: Option<f64>, max_iterations: Option<usize>) -> SolverConfig {
    let mut cfg = SolverConfig::default();
    if let Some(t) = gradient_tolerance {
        cfg.gradient_tolerance = t;
    }
    if let Some(m) = max_iterations {
        cfg.max_iterations = m;
    }
    cfg
}

#[pyfunction]
#[pyo3(signature = (domain, rule, functional = None, gradient_tolerance = None, max_iterations = None))]
fn minimize<'py>(
    py: Python<'py>,
    domain: &PyDomain,
    rule: &PyRule,
    functional: Option<&PyFunctional>,
    gradient_tolerance: Option<f64>,
    max_iterations: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let spec = spec_of(functional);
    let cfg = solver_config(gradient_tolerance, max_iterations);
    let r = py.detach(|| solver::minimize(&domain.inner, &spec, &rule.inner, &cfg)).py()?;
    report_dict(py, r)
}

#[pyfunction]
#[pyo3(signature = (domain, rule, starts = 8, seed = 0, functional = None))]
fn uniqueness_audit<'py>(
    py: Python<'py>,
    domain: &PyDomain,
    rule: &PyRule,
    starts: usize,
    seed: u64,
    functional: Option<&PyFunctional>,
) -> PyResult<Bound<'py, PyDict>> {
    let spec = spec_of(functional);
    let cfg = SolverConfig::default();
    let r = py.detach(|| solver::uniqueness_audit(&domain.inner, &spec, &rule.inner, &cfg, starts, seed)).py()?;
    report_dict(py, r)
}

fn series_params(n: usize, rings: Vec<(f64, f64)>, terms: Option<usize>) -> PyResult<SeriesParams> {
    let p = SeriesParams::new(n, rings).py()?;
    Ok(match terms {
        Some(k) => p.with_truncation(Truncation::Fixed(k)),
        None => p,
    })
}

/// `(psi, psi', psi'')` at radius `r` from the Gegenbauer series.
#[pyfunction]
#[pyo3(signature = (n, rings, r, terms = None))]
fn psi_series(n: usize, rings: Vec<(f64, f64)>, r: f64, terms: Option<usize>) -> PyResult<(f64, f64, f64)> {
    let v = annulus_series::psi_series(&series_params(n, rings, terms)?, r).py()?;
    Ok((v.psi, v.d1, v.d2))
}

#[pyfunction]
#[pyo3(signature = (n, rings, terms = None))]
fn critical_radii(n: usize, rings: Vec<(f64, f64)>, terms: Option<usize>) -> PyResult<Vec<f64>> {
    annulus_series::critical_radii(&series_params(n, rings, terms)?).py()
}

#[pyfunction]
fn a_k(n: usize, k: usize) -> f64 {
    annulus_series::a_k(n, k)
}

#[pyfunction]
fn i_j_integrals(n: usize, m: usize) -> (f64, f64) {
    annulus_series::i_j_integrals(n, m)
}

#[pyfunction]
fn gegenbauer(k: usize, lam: f64, t: f64) -> f64 {
    annulus_series::gegenbauer(k, lam, t)
}

#[pyfunction]
fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    sphere_quadrature::gauss_legendre(m)
}

/// Cartesian Monte Carlo estimate of psi with its standard error.
#[pyfunction]
#[pyo3(signature = (domain, xi, samples = 1 << 20, seed = 0, r_out = None))]
fn psi_cartesian<'py>(
    py: Python<'py>,
    domain: &PyDomain,
    xi: Vec<f64>,
    samples: usize,
    seed: u64,
    r_out: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = OracleConfig { r_out, samples, seed };
    let e = py.detach(|| oracle::psi_cartesian(&domain.inner, &xi, &cfg)).py()?;
    let d = PyDict::new(py);
    d.set_item("value", e.value)?;
    d.set_item("statistical_error", e.statistical_error)?;
    d.set_item("tail", e.tail)?;
    d.set_item("r_out", e.r_out)?;
    d.set_item("samples", e.samples)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (big_r, r, n, points_per_panel = 24))]
fn ball_radial_derivative(big_r: f64, r: f64, n: usize, points_per_panel: usize) -> PyResult<f64> {
    oracle::ball_radial_derivative(big_r, r, n, points_per_panel).py()
}

#[pymodule]
fn psikit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PyDomain>()?;
    m.add_class::<PyRule>()?;
    m.add_class::<PyFunctional>()?;
    m.add("PsikitError", py.get_type::<PsikitError>())?;
    m.add("NotInteriorError", py.get_type::<NotInteriorError>())?;
    m.add("NumericalError", py.get_type::<NumericalError>())?;
    m.add("DisagreementError", py.get_type::<DisagreementError>())?;
    m.add_function(wrap_pyfunction!(psi, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(grad_fd, m)?)?;
    m.add_function(wrap_pyfunction!(minimize, m)?)?;
    m.add_function(wrap_pyfunction!(uniqueness_audit, m)?)?;
    m.add_function(wrap_pyfunction!(psi_series, m)?)?;
    m.add_function(wrap_pyfunction!(critical_radii, m)?)?;
    m.add_function(wrap_pyfunction!(a_k, m)?)?;
    m.add_function(wrap_pyfunction!(i_j_integrals, m)?)?;
    m.add_function(wrap_pyfunction!(gegenbauer, m)?)?;
    m.add_function(wrap_pyfunction!(gauss_legendre, m)?)?;
    m.add_function(wrap_pyfunction!(psi_cartesian, m)?)?;
    m.add_function(wrap_pyfunction!(ball_radial_derivative, m)?)?;
    Ok(())
}
