//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use psikit_cli::checks::{self, Line, BALL_RADII};
use psikit_core::functional::psi;
use psikit_core::{Domain, Result};

use serde_json::Value;

const SEED: u64 = 20240601;

struct Outcome {
    passed: bool,
    details: String,
}

fn from_lines(lines: Result<Vec<Line>>) -> Outcome {
    match lines {
        Err(e) => Outcome { passed: false, details: format!("error: {e}") },
        Ok(lines) => {
            let failed: Vec<String> = lines.iter().filter(|l| !l.passed).map(Line::render).collect();
            let details = if failed.is_empty() {
                let worst: Vec<String> = lines.iter().map(|l| format!("{}={:.3e}", l.name, l.worst)).collect();
                format!("{} checks; {}", lines.len(), worst.join(" "))
            } else {
                format!("{} of {} checks failed: {}", failed.len(), lines.len(), failed.join(" | "))
            };
            Outcome { passed: failed.is_empty(), details }
        }
    }
}

fn filtered(lines: Result<Vec<Line>>, keep: impl Fn(&Line) -> bool) -> Result<Vec<Line>> {
    lines.map(|ls| ls.into_iter().filter(|l| keep(l)).collect())
}

fn ball_uniqueness() -> Outcome {
    let dir = tempfile::TempDir::new().expect("temp dir");
    let start = Instant::now();
    let mut worst_loc: f64 = 0.0;
    let mut worst_agree: f64 = 0.0;
    for n in [2usize, 3] {
        for r in BALL_RADII {
            let center = vec!["0"; n].join(", ");
            let path = dir.path().join(format!("ball_{n}_{r}.json"));
            std::fs::write(&path, format!(r#"{{"shape": "ball", "center": [{center}], "radius": {r}}}"#)).unwrap();
            let out = Command::new(env!("CARGO_BIN_EXE_psikit"))
                .args(["solve", "--config", path.to_str().unwrap(), "--starts", "20"])
                .output()
                .expect("binary runs");
            if out.status.code() != Some(0) {
                return Outcome {
                    passed: false,
                    details: format!(
                        "n={n} R={r}: exit {:?}: {}",
                        out.status.code(),
                        String::from_utf8_lossy(&out.stderr)
                    ),
                };
            }
            let doc: Value = serde_json::from_slice(&out.stdout).expect("JSON report");
            let x: f64 =
                doc["minimizer"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap().powi(2)).sum::<f64>().sqrt();
            worst_loc = worst_loc.max(x / r);
            worst_agree = worst_agree.max(doc["max_pairwise_start_disagreement"].as_f64().unwrap() / r);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        passed: worst_loc <= 1e-7 && worst_agree <= 1e-7 && secs < 10.0,
        details: format!(
            "max |x*|/R={worst_loc:.3e} (<=1e-7), max 20-start disagreement/R={worst_agree:.3e} (<=1e-7), runtime {secs:.2}s (<10s)"
        ),
    }
}

fn ball_center_value() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [2usize, 3] {
        for r in BALL_RADII {
            let dom = Domain::ball(vec![0.0; n], r).unwrap();
            let rule = psikit_cli::shapes::default_rule(n);
            match psi(&dom, &vec![0.0; n], &rule) {
                Ok(v) => {
                    worst = worst.max((v - checks::ball_center_value(n, r)).abs() / checks::ball_center_value(n, r))
                }
                Err(e) => return Outcome { passed: false, details: format!("error: {e}") },
            }
        }
    }
    // the two textbook values on the unit ball
    let unit2 = checks::ball_center_value(2, 1.0);
    let unit3 = checks::ball_center_value(3, 1.0);
    let exact = (unit2 - PI).abs() <= 1e-15 * PI && (unit3 - 4.0 * PI / 3.0).abs() <= 1e-15 * 4.0;
    Outcome {
        passed: worst <= 1e-10 && exact,
        details: format!("max relative error {worst:.3e} (<=1e-10) over R in {BALL_RADII:?}, n in {{2,3}}"),
    }
}

fn ball_monotonicity() -> Outcome {
    let (mut worst, mut smallest) = (0.0_f64, f64::INFINITY);
    for n in [2usize, 3] {
        for r in BALL_RADII {
            match checks::ball_monotonicity(n, r) {
                Ok((w, s)) => {
                    worst = worst.max(w);
                    smallest = smallest.min(s);
                }
                Err(e) => return Outcome { passed: false, details: format!("error: {e}") },
            }
        }
    }
    Outcome {
        passed: smallest > 0.0 && worst <= 1e-4,
        details: format!(
            "min psi'={smallest:.3e} (>0), max rel gap to differences {worst:.3e} (<=1e-4), 50 radii per case"
        ),
    }
}

fn timed(f: impl FnOnce() -> Outcome, limit: f64) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let secs = start.elapsed().as_secs_f64();
    o.passed &= secs < limit;
    o.details = format!("{}; runtime {secs:.2}s (<{limit}s)", o.details);
    o
}

type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("ball_uniqueness", Box::new(ball_uniqueness)),
        ("ball_center_value", Box::new(ball_center_value)),
        ("ball_monotonicity", Box::new(ball_monotonicity)),
        ("ellipsoid_symmetry", Box::new(|| from_lines(checks::symmetry(SEED)))),
        ("strict_convexity", Box::new(|| from_lines(checks::convexity(SEED)))),
        ("gradient_formula", Box::new(|| from_lines(checks::gradient(SEED)))),
        ("hessian_positive_definite", Box::new(|| from_lines(checks::hessian(SEED)))),
        ("gegenbauer", Box::new(|| from_lines(checks::gegenbauer_suite()))),
        ("annulus", Box::new(|| from_lines(filtered(checks::annulus(SEED), |l| l.name.starts_with("annulus_"))))),
        (
            "multi_annulus",
            Box::new(|| from_lines(filtered(checks::annulus(SEED), |l| l.name.starts_with("multi_annulus_")))),
        ),
        ("oracle_agreement", Box::new(|| timed(|| from_lines(checks::oracle(SEED)), 60.0))),
        (
            "rho_properties",
            Box::new(|| {
                let mut all = Vec::new();
                for suite in ["concavity", "translation", "lipschitz", "transversality"] {
                    match checks::suite(suite, SEED) {
                        Ok(lines) => all.extend(lines),
                        Err(e) => return from_lines(Err(e)),
                    }
                }
                from_lines(Ok(all))
            }),
        ),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.passed {
            failures += 1;
        }
        println!("{} {} {}: {}", if o.passed { "PASS" } else { "FAIL" }, i + 1, name, o.details);
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
