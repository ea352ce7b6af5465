//! Minimization of `Phi` on convex domains.
//!
//! Damped Newton with Armijo backtracking. Steps are clipped to a fraction of the ray exit so
//! iterates never approach the boundary layer where `rho^-n` explodes. On polytopes the
//! discretized functional has kinks (a quadrature ray switches faces), so Newton can stagnate
//! without driving the gradient to zero; a central-cut ellipsoid method then localizes the
//! minimizer using the gradient as a subgradient.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functional::{evaluate_core, EvalResult, FunctionalSpec};
use crate::geometry::Domain;
use crate::sphere_quadrature::SphericalRule;
use crate::vecops::{add_scaled, distance, dot, norm};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Relative to `max(|grad Phi(x0)|, Phi(x0) / diam)`.
    pub gradient_tolerance: f64,
    pub max_iterations: usize,
    pub backtracking: f64,
    pub sufficient_decrease: f64,
    /// Iterates keep at least this fraction of the diameter from the boundary.
    pub boundary_guard: f64,
    /// Newton steps are clipped to this fraction of the ray exit along the step.
    pub step_clip: f64,
    /// Rule refinements attempted after a line-search stall.
    pub max_refinements: usize,
    /// Random starts keep at least this fraction of the diameter from the boundary.
    pub start_margin: f64,
    /// Multi-start minimizers must agree to this fraction of the diameter.
    pub agreement_tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            gradient_tolerance: 1e-9,
            max_iterations: 200,
            backtracking: 0.5,
            sufficient_decrease: 1e-4,
            boundary_guard: 1e-9,
            step_clip: 0.9,
            max_refinements: 3,
            start_margin: 0.05,
            agreement_tolerance: 1e-6,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("gradient_tolerance", self.gradient_tolerance),
            ("boundary_guard", self.boundary_guard),
            ("start_margin", self.start_margin),
            ("agreement_tolerance", self.agreement_tolerance),
            ("sufficient_decrease", self.sufficient_decrease),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.backtracking > 0.0 && self.backtracking < 1.0) {
            return Err(Error::InvalidArgument("backtracking factor must lie in (0, 1)".into()));
        }
        if !(self.step_clip > 0.0 && self.step_clip < 1.0) {
            return Err(Error::InvalidArgument("step clip must lie in (0, 1)".into()));
        }
        if self.sufficient_decrease >= 0.5 {
            return Err(Error::InvalidArgument("sufficient decrease constant must be below 0.5".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

/// How the search ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// `|grad Phi|` fell below the tolerance.
    GradientTolerance,
    /// Further decrease is below floating-point resolution of `Phi`.
    RoundingLimited,
    /// The ellipsoid method localized a minimizer at a kink of the discretized functional.
    NonsmoothFinish,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPointReport {
    pub minimizer: Vec<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub gradient_tolerance: f64,
    pub iterations: usize,
    pub starts_used: usize,
    pub max_pairwise_start_disagreement: f64,
    pub termination: Termination,
    /// Number of quadrature nodes in the rule that produced the result.
    pub quadrature_nodes: usize,
    /// `Phi` at each accepted iterate, starting with the start point.
    pub history: Vec<f64>,
}

/// A deterministic interior start point.
pub fn initial_point(dom: &Domain) -> Result<Vec<f64>> {
    let x = match dom {
        Domain::Ball(b) => b.center().to_vec(),
        Domain::Ellipsoid(e) => e.center().to_vec(),
        Domain::Stadium(s) => {
            let (p, q) = s.endpoints();
            vec![0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]
        }
        Domain::MultiAnnulus(m) => {
            let mut x = m.center().to_vec();
            let (a, b) = m.rings()[0];
            x[0] += 0.5 * (a + b);
            x
        }
        Domain::Implicit(d) => d.interior_point.clone(),
        Domain::Polytope(_) => deepest_grid_point(dom),
    };
    if dom.contains(&x) {
        Ok(x)
    } else {
        Err(Error::EmptyInterior)
    }
}

/// Average of the grid points over the bounding box that maximize the boundary distance.
fn deepest_grid_point(dom: &Domain) -> Vec<f64> {
    let n = dom.dimension();
    let (c, r) = dom.bounding_ball();
    let per_axis: usize = if n == 2 { 81 } else { 33 };
    let total = per_axis.pow(n as u32);
    let mut best = 0.0;
    let mut sum = vec![0.0; n];
    let mut count = 0usize;
    let mut x = vec![0.0; n];
    for idx in 0..total {
        let mut rem = idx;
        for (k, xk) in x.iter_mut().enumerate() {
            let i = rem % per_axis;
            rem /= per_axis;
            *xk = c[k] - r + 2.0 * r * i as f64 / (per_axis - 1) as f64;
        }
        let d = dom.boundary_distance(&x);
        if d <= 0.0 {
            continue;
        }
        if d > best * (1.0 + 1e-12) {
            best = d;
            sum.copy_from_slice(&x);
            count = 1;
        } else if d >= best * (1.0 - 1e-12) {
            sum.iter_mut().zip(&x).for_each(|(s, v)| *s += v);
            count += 1;
        }
    }
    if count == 0 {
        return c;
    }
    sum.iter().map(|s| s / count as f64).collect()
}

/// Extra Newton steps taken after the gradient tolerance is met.
const POLISH_STEPS: usize = 3;

struct Problem<'a> {
    dom: &'a Domain,
    spec: &'a FunctionalSpec,
    cfg: &'a SolverConfig,
    diam: f64,
    guard: f64,
}

enum NewtonOutcome {
    Converged(Termination),
    /// Line search failed although the predicted decrease was meaningful.
    Stalled,
    /// Accepted steps became negligibly short without meeting the tolerance.
    Stagnated,
}

struct State {
    x: Vec<f64>,
    eval: EvalResult,
    iterations: usize,
    history: Vec<f64>,
}

impl<'a> Problem<'a> {
    fn feasible(&self, x: &[f64]) -> bool {
        self.dom.contains(x) && self.dom.boundary_distance(x) >= self.guard
    }

    fn eval(&self, x: &[f64], rule: &SphericalRule) -> Result<EvalResult> {
        evaluate_core(self.dom, x, self.spec, rule, true)
    }

    /// Hessian from the evaluation, or central differences of the gradient.
    fn hessian(&self, x: &[f64], ev: &EvalResult, rule: &SphericalRule) -> Result<DMatrix<f64>> {
        if let Some(h) = ev.hessian_matrix() {
            return Ok(h);
        }
        let n = x.len();
        let h = 1e-5 * self.diam;
        let mut m = DMatrix::zeros(n, n);
        let mut p = x.to_vec();
        for j in 0..n {
            p[j] = x[j] + h;
            let gp = evaluate_core(self.dom, &p, self.spec, rule, false)?.gradient;
            p[j] = x[j] - h;
            let gm = evaluate_core(self.dom, &p, self.spec, rule, false)?.gradient;
            p[j] = x[j];
            for i in 0..n {
                m[(i, j)] = (gp[i] - gm[i]) / (2.0 * h);
            }
        }
        Ok(0.5 * (&m + m.transpose()))
    }

    /// Newton direction, shifted towards gradient descent until the system is positive definite.
    fn direction(&self, h: DMatrix<f64>, g: &[f64]) -> Vec<f64> {
        let n = g.len();
        let rhs = -DVector::from_column_slice(g);
        let scale = h.diagonal().iter().map(|v| v.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let mut shift = 0.0;
        for _ in 0..60 {
            let shifted = &h + DMatrix::identity(n, n) * shift;
            if let Some(ch) = shifted.cholesky() {
                let p = ch.solve(&rhs);
                if p.iter().all(|v| v.is_finite()) {
                    return p.iter().copied().collect();
                }
            }
            shift = if shift == 0.0 { 1e-10 * scale } else { shift * 4.0 };
        }
        g.iter().map(|v| -v).collect()
    }

    fn newton(&self, st: &mut State, rule: &SphericalRule, tol: f64) -> Result<NewtonOutcome> {
        let eps = f64::EPSILON;
        let mut short_steps = 0;
        loop {
            let g = st.eval.gradient.clone();
            let gnorm = norm(&g);
            if gnorm <= tol {
                return Ok(NewtonOutcome::Converged(Termination::GradientTolerance));
            }
            if st.iterations >= self.cfg.max_iterations {
                return Err(Error::MaxIterations(st.iterations));
            }
            st.iterations += 1;
            let h = self.hessian(&st.x, &st.eval, rule)?;
            let mut p = self.direction(h, &g);
            if dot(&g, &p) >= 0.0 {
                p = g.iter().map(|v| -v).collect();
            }
            let plen = norm(&p);
            let unit: Vec<f64> = p.iter().map(|v| v / plen).collect();
            let exit = self.dom.exit_unchecked(&st.x, &unit, None);
            if plen > self.cfg.step_clip * exit {
                let s = self.cfg.step_clip * exit / plen;
                p.iter_mut().for_each(|v| *v *= s);
            }
            let slope = dot(&g, &p);
            let f0 = st.eval.value;
            let mut alpha = 1.0;
            let mut accepted = None;
            for _ in 0..60 {
                let trial = add_scaled(&st.x, alpha, &p);
                if self.feasible(&trial) {
                    let ev = self.eval(&trial, rule)?;
                    if ev.value <= f0 + self.cfg.sufficient_decrease * alpha * slope && ev.value < f0 {
                        accepted = Some((trial, ev));
                        break;
                    }
                }
                alpha *= self.cfg.backtracking;
            }
            match accepted {
                Some((x, ev)) => {
                    let step = alpha * norm(&p);
                    st.x = x;
                    st.eval = ev;
                    st.history.push(st.eval.value);
                    if step < 1e-12 * self.diam {
                        short_steps += 1;
                        if short_steps >= 3 {
                            return Ok(NewtonOutcome::Stagnated);
                        }
                    } else {
                        short_steps = 0;
                    }
                }
                None => {
                    // predicted decrease below the resolution of Phi
                    if -slope <= 100.0 * eps * f0.abs() {
                        return Ok(NewtonOutcome::Converged(Termination::RoundingLimited));
                    }
                    return Ok(NewtonOutcome::Stalled);
                }
            }
        }
    }

    /// After the tolerance is met, keeps taking full Newton steps while each one lowers both
    /// `Phi` and the gradient norm. A start far out in the boundary layer sets a loose absolute
    /// tolerance, and a couple of quadratically convergent steps recover the digits it gives away.
    fn polish(&self, st: &mut State, rule: &SphericalRule) -> Result<()> {
        for _ in 0..POLISH_STEPS {
            if st.iterations >= self.cfg.max_iterations {
                break;
            }
            let g = st.eval.gradient.clone();
            let h = self.hessian(&st.x, &st.eval, rule)?;
            let p = self.direction(h, &g);
            if dot(&g, &p) >= 0.0 {
                break;
            }
            let trial = add_scaled(&st.x, 1.0, &p);
            if !self.feasible(&trial) {
                break;
            }
            let ev = self.eval(&trial, rule)?;
            if !(ev.value < st.eval.value && ev.gradient_norm() < st.eval.gradient_norm()) {
                break;
            }
            st.iterations += 1;
            st.x = trial;
            st.eval = ev;
            st.history.push(st.eval.value);
        }
        Ok(())
    }

    /// Central-cut ellipsoid method in a ball around the current iterate. Returns `false` if
    /// the best point ended up on the rim of the search ball (the caller re-centres).
    fn ellipsoid_finish(&self, st: &mut State, rule: &SphericalRule, tol: f64) -> Result<bool> {
        let n = st.x.len();
        let nf = n as f64;
        let radius = (0.5 * self.dom.boundary_distance(&st.x)).min(0.05 * self.diam);
        let origin = st.x.clone();
        let mut c = st.x.clone();
        let mut p = DMatrix::<f64>::identity(n, n) * (radius * radius);
        let stop = 1e-11 * self.diam;
        let budget = 400 * n * n;
        for _ in 0..budget {
            let cut: Vec<f64> = if self.feasible(&c) {
                let ev = self.eval(&c, rule)?;
                st.iterations += 1;
                if ev.value < st.eval.value {
                    st.x = c.clone();
                    st.eval = ev.clone();
                    st.history.push(ev.value);
                    if ev.gradient_norm() <= tol {
                        return Ok(true);
                    }
                }
                ev.gradient
            } else {
                // supporting half-space at the boundary crossing from the best point
                let u = crate::vecops::sub(&c, &st.x);
                let len = norm(&u);
                let u: Vec<f64> = u.iter().map(|v| v / len).collect();
                let mut nu = vec![0.0; n];
                self.dom.exit_unchecked(&st.x, &u, Some(&mut nu));
                nu
            };
            let gv = DVector::from_column_slice(&cut);
            let pg = &p * &gv;
            let gpg = gv.dot(&pg);
            if !(gpg > 0.0) {
                break;
            }
            let b = pg / gpg.sqrt();
            if n == 1 {
                break;
            }
            for i in 0..n {
                c[i] -= b[i] / (nf + 1.0);
            }
            p = (&p - (&b * b.transpose()) * (2.0 / (nf + 1.0))) * (nf * nf / (nf * nf - 1.0));
            p = 0.5 * (&p + p.transpose());
            let widest = p.diagonal().iter().cloned().fold(0.0, f64::max).sqrt();
            if widest < stop {
                break;
            }
        }
        Ok(distance(&st.x, &origin) < 0.9 * radius)
    }
}

/// Finds the minimizer of `Phi` from [`initial_point`].
pub fn minimize(
    dom: &Domain,
    spec: &FunctionalSpec,
    rule: &SphericalRule,
    cfg: &SolverConfig,
) -> Result<CriticalPointReport> {
    let x0 = initial_point(dom)?;
    minimize_from(dom, spec, rule, cfg, &x0)
}

pub fn minimize_from(
    dom: &Domain,
    spec: &FunctionalSpec,
    rule: &SphericalRule,
    cfg: &SolverConfig,
    start: &[f64],
) -> Result<CriticalPointReport> {
    cfg.validate()?;
    if !dom.is_convex() {
        return Err(Error::NonConvexDomain);
    }
    let diam = dom.diameter();
    let prob = Problem { dom, spec, cfg, diam, guard: cfg.boundary_guard * diam };
    if !dom.contains(start) {
        return Err(Error::PointNotInterior);
    }
    let mut rule = rule.clone();
    let eval = prob.eval(start, &rule)?;
    let tol = cfg.gradient_tolerance * eval.gradient_norm().max(eval.value.abs() / diam);
    let mut st = State { x: start.to_vec(), history: vec![eval.value], eval, iterations: 0 };
    let mut refinements = 0;
    let termination = loop {
        match prob.newton(&mut st, &rule, tol)? {
            NewtonOutcome::Converged(t) => {
                if t == Termination::GradientTolerance {
                    prob.polish(&mut st, &rule)?;
                }
                break t;
            }
            NewtonOutcome::Stalled if matches!(dom, Domain::Ball(_) | Domain::Ellipsoid(_)) => {
                if refinements >= cfg.max_refinements {
                    return Err(Error::LineSearchStall { iteration: st.iterations });
                }
                refinements += 1;
                rule = rule.refined();
                st.eval = prob.eval(&st.x, &rule)?;
                st.history.push(st.eval.value);
            }
            NewtonOutcome::Stalled | NewtonOutcome::Stagnated => {
                let mut settled = false;
                for _ in 0..5 {
                    if prob.ellipsoid_finish(&mut st, &rule, tol)? {
                        settled = true;
                        break;
                    }
                }
                if !settled {
                    return Err(Error::LineSearchStall { iteration: st.iterations });
                }
                break if st.eval.gradient_norm() <= tol {
                    Termination::GradientTolerance
                } else {
                    Termination::NonsmoothFinish
                };
            }
        }
    };
    Ok(CriticalPointReport {
        gradient_norm: st.eval.gradient_norm(),
        value: st.eval.value,
        minimizer: st.x,
        gradient_tolerance: tol,
        iterations: st.iterations,
        starts_used: 1,
        max_pairwise_start_disagreement: 0.0,
        termination,
        quadrature_nodes: rule.len(),
        history: st.history,
    })
}

/// Reproducible interior start points at least `start_margin * diam` from the boundary.
pub fn random_starts(dom: &Domain, count: usize, seed: u64, margin: f64) -> Result<Vec<Vec<f64>>> {
    let min_distance = margin * dom.diameter();
    (0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            dom.sample_interior(&mut rng, min_distance, 1_000_000).ok_or(Error::EmptyInterior)
        })
        .collect()
}

/// Runs [`minimize_from`] from `starts` random points and checks that all runs agree.
///
/// The returned report is the lowest-valued run, with `starts_used` and the largest pairwise
/// distance between minimizers filled in. Disagreement beyond `agreement_tolerance * diam`
/// is an error.
pub fn uniqueness_audit(
    dom: &Domain,
    spec: &FunctionalSpec,
    rule: &SphericalRule,
    cfg: &SolverConfig,
    starts: usize,
    seed: u64,
) -> Result<CriticalPointReport> {
    if starts == 0 {
        return Err(Error::InvalidArgument("at least one start is required".into()));
    }
    let points = random_starts(dom, starts, seed, cfg.start_margin)?;
    let runs: Vec<Result<CriticalPointReport>> =
        points.par_iter().map(|x| minimize_from(dom, spec, rule, cfg, x)).collect();
    let runs: Vec<CriticalPointReport> = runs.into_iter().collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for i in 0..runs.len() {
        for j in (i + 1)..runs.len() {
            worst = worst.max(distance(&runs[i].minimizer, &runs[j].minimizer));
        }
    }
    let iterations = runs.iter().map(|r| r.iterations).sum();
    let mut best = runs.into_iter().reduce(|a, b| if b.value < a.value { b } else { a }).expect("at least one run");
    best.starts_used = starts;
    best.iterations = iterations;
    best.max_pairwise_start_disagreement = worst;
    let tolerance = cfg.agreement_tolerance * dom.diameter();
    if worst > tolerance {
        return Err(Error::DisagreementExceedsTolerance { disagreement: worst, tolerance });
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere_quadrature::build_rule;

    #[test]
    fn initial_points() {
        let b = Domain::ball([0.0, 0.0], 1.0).unwrap();
        assert_eq!(initial_point(&b).unwrap(), vec![0.0, 0.0]);
        let sq = Domain::axis_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let x = initial_point(&sq).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-12 && (x[1] - 0.5).abs() < 1e-12);
        let ann = Domain::multi_annulus([0.0, 0.0], vec![(1.0, 2.0)]).unwrap();
        assert_eq!(initial_point(&ann).unwrap(), vec![1.5, 0.0]);
    }

    #[test]
    fn ball_minimizer_is_center() {
        let b = Domain::ball([0.0, 0.0], 1.0).unwrap();
        let rule = build_rule(2, 64).unwrap();
        let rep = minimize_from(&b, &FunctionalSpec::psi(), &rule, &SolverConfig::default(), &[0.4, -0.3]).unwrap();
        assert!(norm(&rep.minimizer) < 1e-8, "{:?}", rep);
        assert!(rep.history.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn shifted_ellipsoid_minimizer_is_center() {
        let e = Domain::ellipsoid([1.0, -2.0], [2.0, 0.7]).unwrap();
        let rule = build_rule(2, 128).unwrap();
        let rep =
            minimize_from(&e, &FunctionalSpec::exp_decay(), &rule, &SolverConfig::default(), &[2.2, -1.8]).unwrap();
        assert!(distance(&rep.minimizer, &[1.0, -2.0]) < 1e-7 * 4.0, "{:?}", rep.minimizer);
    }

    #[test]
    fn square_minimizer_is_center() {
        let sq = Domain::axis_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let rule = build_rule(2, 512).unwrap();
        let rep = minimize_from(&sq, &FunctionalSpec::psi(), &rule, &SolverConfig::default(), &[0.2, 0.7]).unwrap();
        assert!(distance(&rep.minimizer, &[0.5, 0.5]) < 1e-6, "{:?}", rep);
    }

    #[test]
    fn non_convex_is_rejected() {
        let ann = Domain::multi_annulus([0.0, 0.0], vec![(1.0, 2.0)]).unwrap();
        let rule = build_rule(2, 16).unwrap();
        assert_eq!(
            minimize(&ann, &FunctionalSpec::psi(), &rule, &SolverConfig::default()),
            Err(Error::NonConvexDomain)
        );
    }

    #[test]
    fn audit_is_reproducible() {
        let e = Domain::ellipsoid([0.0, 0.0], [1.5, 1.0]).unwrap();
        let rule = build_rule(2, 64).unwrap();
        let cfg = SolverConfig::default();
        let a = uniqueness_audit(&e, &FunctionalSpec::psi(), &rule, &cfg, 6, 11).unwrap();
        let b = uniqueness_audit(&e, &FunctionalSpec::psi(), &rule, &cfg, 6, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.starts_used, 6);
        assert!(a.max_pairwise_start_disagreement <= 1e-6 * 3.0);
    }
}
