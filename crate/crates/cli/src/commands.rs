//! Subcommand implementations. Each returns the exit code or a [`CliError`].

use std::path::Path;

use psikit_core::annulus_series::{critical_radii, psi_series, SeriesParams, Truncation};
use psikit_core::functional::{evaluate, evaluate_core, psi};
use psikit_core::oracle::{ball_radial_derivative, psi_cartesian, OracleConfig};
use psikit_core::solver::{minimize, uniqueness_audit};
use psikit_core::{Termination, UnitDirection};

use crate::checks;
use crate::config::{parse_point, parse_rings, Config};
use crate::output::{fmt_num, Json};
use crate::{CliError, Command};

pub fn dispatch(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Eval { config, point } => emit(cmd_eval(&config, &point)?),
        Command::Solve { config, starts, tol, seed } => emit(cmd_solve(&config, starts, tol, seed)?),
        Command::Annulus { n, rings, terms } => emit(cmd_annulus(n, &rings, terms)?),
        Command::Sweep { config, from, to, samples, out } => emit(cmd_sweep(&config, &from, &to, samples, &out)?),
        Command::Oracle { config, point, samples, seed, r_out, ball_radius, radius, n, points } => {
            let doc = match (config, ball_radius) {
                (Some(config), _) => {
                    let point = point.ok_or_else(|| CliError::config("--point is required with --config"))?;
                    cmd_oracle(&config, &point, samples, seed, r_out)?
                }
                (None, Some(big_r)) => {
                    let r = radius.ok_or_else(|| CliError::config("--radius is required with --ball-radius"))?;
                    cmd_ball_derivative(big_r, r, n, points)?
                }
                (None, None) => return Err(CliError::config("either --config or --ball-radius is required")),
            };
            emit(doc)
        }
        Command::Check { suite, seed } => {
            let report = checks::run_suite(&suite, seed)?;
            print!("{}", report.render());
            Ok(if report.passed() { 0 } else { 1 })
        }
    }
}

fn emit(doc: Json) -> Result<i32, CliError> {
    print!("{}", doc.render());
    Ok(0)
}

fn interior_point(cfg: &Config, text: &str) -> Result<Vec<f64>, CliError> {
    let x = parse_point(text, cfg.domain.dimension())?;
    if !cfg.domain.contains(&x) {
        return Err(CliError::new(3, format!("point ({text}) is not in the interior of the domain")));
    }
    Ok(x)
}

fn matrix_json(h: &[f64], n: usize) -> Json {
    Json::Arr(h.chunks(n).map(Json::from).collect())
}

pub fn cmd_eval(config: &Path, point: &str) -> Result<Json, CliError> {
    let cfg = Config::load(config)?;
    let x = interior_point(&cfg, point)?;
    let n = cfg.domain.dimension();
    let r = evaluate(&cfg.domain, &x, &cfg.functional, &cfg.rule, true)?;
    Ok(Json::obj()
        .with("shape", cfg.domain.shape_name())
        .with("dimension", n)
        .with("functional", cfg.functional.label())
        .with("point", x)
        .with("psi", r.value)
        .with("gradient", r.gradient.clone())
        .with("gradient_norm", r.gradient_norm())
        .with("hessian", r.hessian.as_deref().map(|h| matrix_json(h, n)).unwrap_or(Json::Null))
        .with("quadrature_error", r.quadrature_error_estimate)
        .with("quadrature_nodes", cfg.rule.len()))
}

fn termination_name(t: Termination) -> &'static str {
    match t {
        Termination::GradientTolerance => "gradient_tolerance",
        Termination::RoundingLimited => "rounding_limited",
        Termination::NonsmoothFinish => "nonsmooth_finish",
    }
}

pub fn cmd_solve(config: &Path, starts: usize, tol: Option<f64>, seed: u64) -> Result<Json, CliError> {
    let mut cfg = Config::load(config)?;
    if let Some(t) = tol {
        cfg.solver.gradient_tolerance = t;
    }
    cfg.solver.validate().map_err(|e| CliError::config(e.to_string()))?;
    if !cfg.domain.is_convex() {
        return Err(CliError::config("solve needs a convex shape; use the annulus subcommand for rings"));
    }
    let report = if starts == 0 {
        minimize(&cfg.domain, &cfg.functional, &cfg.rule, &cfg.solver)?
    } else {
        uniqueness_audit(&cfg.domain, &cfg.functional, &cfg.rule, &cfg.solver, starts, seed)?
    };
    let diam = cfg.domain.diameter();
    Ok(Json::obj()
        .with("shape", cfg.domain.shape_name())
        .with("dimension", cfg.domain.dimension())
        .with("functional", cfg.functional.label())
        .with("minimizer", report.minimizer.clone())
        .with("value", report.value)
        .with("gradient_norm", report.gradient_norm)
        .with("gradient_tolerance", report.gradient_tolerance)
        .with("iterations", report.iterations)
        .with("starts_used", report.starts_used)
        .with("seed", seed)
        .with("max_pairwise_start_disagreement", report.max_pairwise_start_disagreement)
        .with("agreement_tolerance", cfg.solver.agreement_tolerance * diam)
        .with("termination", termination_name(report.termination))
        .with("quadrature_nodes", report.quadrature_nodes))
}

pub fn cmd_annulus(n: usize, rings: &str, terms: Option<usize>) -> Result<Json, CliError> {
    let rings = parse_rings(rings)?;
    let mut params = SeriesParams::new(n, rings.clone())?;
    if let Some(k) = terms {
        params = params.with_truncation(Truncation::Fixed(k));
    }
    let radii = critical_radii(&params)?;
    let values = radii.iter().map(|&r| psi_series(&params, r)).collect::<Result<Vec<_>, _>>()?;
    Ok(Json::obj()
        .with("n", n)
        .with("rings", Json::Arr(rings.iter().map(|&(a, b)| Json::from(vec![a, b])).collect()))
        .with("critical_radii", radii.clone())
        .with("psi_at_radii", values.iter().map(|v| v.psi).collect::<Vec<f64>>())
        .with("psi_second_at_radii", values.iter().map(|v| v.d2).collect::<Vec<f64>>())
        .with("series_terms_used", Json::Arr(values.iter().map(|v| Json::from(v.terms_used)).collect()))
        .with("tail_bounds", values.iter().map(|v| v.tail_bound).collect::<Vec<f64>>()))
}

pub fn cmd_sweep(config: &Path, from: &str, to: &str, samples: usize, out: &Path) -> Result<Json, CliError> {
    let cfg = Config::load(config)?;
    let n = cfg.domain.dimension();
    if samples == 0 {
        return Err(CliError::config("--samples must be at least 1"));
    }
    let a = interior_point(&cfg, from)?;
    let b = parse_point(to, n)?;
    let length = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    if length > 0.0 {
        // the whole closed segment must stay inside: the first exit along it lies beyond `to`
        let dir = UnitDirection::between(&a, &b)?;
        if cfg.domain.rho(&a, &dir)? <= length {
            return Err(CliError::new(3, format!("segment from ({from}) to ({to}) leaves the domain")));
        }
    }
    let mut writer =
        csv::Writer::from_path(out).map_err(|e| CliError::new(4, format!("cannot write {}: {e}", out.display())))?;
    let mut header = vec!["t".to_string()];
    header.extend((0..n).map(|i| format!("x{i}")));
    header.extend(["psi".to_string(), "grad_norm".to_string()]);
    writer.write_record(&header).map_err(|e| CliError::new(4, e.to_string()))?;
    for i in 0..samples {
        let t = if samples == 1 { 0.0 } else { i as f64 / (samples - 1) as f64 };
        let x: Vec<f64> = a.iter().zip(&b).map(|(p, q)| p + t * (q - p)).collect();
        let r = evaluate_core(&cfg.domain, &x, &cfg.functional, &cfg.rule, false)?;
        let mut row = vec![fmt_num(t)];
        row.extend(x.iter().map(|&v| fmt_num(v)));
        row.extend([fmt_num(r.value), fmt_num(r.gradient_norm())]);
        writer.write_record(&row).map_err(|e| CliError::new(4, e.to_string()))?;
    }
    writer.flush().map_err(|e| CliError::new(4, e.to_string()))?;
    Ok(Json::obj().with("shape", cfg.domain.shape_name()).with("rows", samples).with("out", out.display().to_string()))
}

pub fn cmd_oracle(config: &Path, point: &str, samples: usize, seed: u64, r_out: Option<f64>) -> Result<Json, CliError> {
    let cfg = Config::load(config)?;
    let x = interior_point(&cfg, point)?;
    let est = psi_cartesian(&cfg.domain, &x, &OracleConfig { r_out, samples, seed })?;
    let spherical = psi(&cfg.domain, &x, &cfg.rule)?;
    Ok(Json::obj()
        .with("shape", cfg.domain.shape_name())
        .with("point", x)
        .with("psi_cartesian", est.value)
        .with("statistical_error", est.statistical_error)
        .with("tail", est.tail)
        .with("r_out", est.r_out)
        .with("samples", est.samples)
        .with("seed", seed)
        .with("psi_spherical", spherical)
        .with("relative_difference", (est.value - spherical).abs() / spherical.abs())
        .with("agrees", est.agrees_with(spherical, 0.01)))
}

pub fn cmd_ball_derivative(big_r: f64, r: f64, n: usize, points: usize) -> Result<Json, CliError> {
    let d = ball_radial_derivative(big_r, r, n, points)?;
    Ok(Json::obj().with("ball_radius", big_r).with("radius", r).with("n", n).with("psi_prime", d))
}
