use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn psikit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psikit")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    assert_eq!(code(out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

const BALL: &str = r#"{"shape": "ball", "center": [0, 0], "radius": 1}"#;
const ELLIPSE: &str = r#"{"shape": "ellipsoid", "center": [0, 0], "semi_axes": [2, 1]}"#;
const SQUARE: &str = r#"{"shape": "box", "lo": [0, 0], "hi": [1, 1]}"#;
const STADIUM: &str = r#"{"shape": "stadium", "p": [-1, 0], "q": [1, 0], "radius": 0.75}"#;

#[test]
fn eval_ball_center_is_pi() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "ball.json", BALL);
    let doc = json(&psikit(&["eval", "--config", s(&cfg), "--point", "0,0"]));
    assert!((num(&doc["psi"]) - std::f64::consts::PI).abs() <= 1e-10 * std::f64::consts::PI);
    assert_eq!(doc["hessian"].as_array().unwrap().len(), 2);
    assert!(num(&doc["quadrature_error"]) >= 0.0);
}

#[test]
fn eval_ellipse_center_has_zero_gradient() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "e.json", ELLIPSE);
    let doc = json(&psikit(&["eval", "--config", s(&cfg), "--point", "0,0"]));
    assert!(num(&doc["gradient_norm"]) <= 1e-9);
}

#[test]
fn eval_exit_codes() {
    let dir = TempDir::new().unwrap();
    let square = write(&dir, "sq.json", SQUARE);
    assert_eq!(code(&psikit(&["eval", "--config", s(&square), "--point", "2,2"])), 3);
    assert_eq!(code(&psikit(&["eval", "--config", s(&square), "--point", "1,0.5"])), 3);
    assert_eq!(code(&psikit(&["eval", "--config", s(&square), "--point", "0.5"])), 2);

    let unknown = write(&dir, "u.json", r#"{"shape": "ball", "center": [0, 0], "radius": 1, "colour": 3}"#);
    assert_eq!(code(&psikit(&["eval", "--config", s(&unknown), "--point", "0,0"])), 2);
    let bad_radius = write(&dir, "r.json", r#"{"shape": "ball", "center": [0, 0], "radius": -1}"#);
    assert_eq!(code(&psikit(&["eval", "--config", s(&bad_radius), "--point", "0,0"])), 2);
    let garbage = write(&dir, "g.json", "not json");
    assert_eq!(code(&psikit(&["eval", "--config", s(&garbage), "--point", "0,0"])), 2);
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&psikit(&["eval", "--config", s(&missing), "--point", "0,0"])), 2);
    assert_eq!(code(&psikit(&["frobnicate"])), 2);
}

#[test]
fn solve_reports_symmetry_centers() {
    let dir = TempDir::new().unwrap();
    for (text, center) in [(BALL, [0.0, 0.0]), (SQUARE, [0.5, 0.5]), (STADIUM, [0.0, 0.0])] {
        let cfg = write(&dir, "c.json", text);
        let doc = json(&psikit(&["solve", "--config", s(&cfg), "--starts", "8"]));
        let x: Vec<f64> = doc["minimizer"].as_array().unwrap().iter().map(num).collect();
        let err = ((x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2)).sqrt();
        assert!(err <= 1e-6, "{text}: {x:?}");
        assert_eq!(doc["starts_used"], 8);
        assert!(num(&doc["max_pairwise_start_disagreement"]) <= num(&doc["agreement_tolerance"]));
    }
}

#[test]
fn solve_output_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "e.json", r#"{"shape": "ellipsoid", "center": [0.3, -0.2], "semi_axes": [1.5, 0.7]}"#);
    let a = psikit(&["solve", "--config", s(&cfg), "--starts", "6", "--seed", "3"]);
    let b = psikit(&["solve", "--config", s(&cfg), "--starts", "6", "--seed", "3"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let single = Command::new(env!("CARGO_BIN_EXE_psikit"))
        .args(["solve", "--config", s(&cfg), "--starts", "6", "--seed", "3"])
        .env("PSIKIT_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, single.stdout);
}

#[test]
fn solve_exit_codes() {
    let dir = TempDir::new().unwrap();
    // an impossible agreement radius turns ordinary rounding noise into a disagreement
    let strict = write(
        &dir,
        "strict.json",
        r#"{"shape": "box", "lo": [0, 0], "hi": [1, 1], "solver": {"agreement_tolerance": 1e-300}}"#,
    );
    assert_eq!(code(&psikit(&["solve", "--config", s(&strict), "--starts", "4"])), 5);
    let starved = write(
        &dir,
        "starved.json",
        r#"{"shape": "ellipsoid", "center": [0, 0], "semi_axes": [2, 1], "solver": {"max_iterations": 1}}"#,
    );
    assert_eq!(code(&psikit(&["solve", "--config", s(&starved), "--starts", "2"])), 4);
    let ring = write(&dir, "ring.json", r#"{"shape": "multi_annulus", "center": [0, 0], "rings": [[1, 2]]}"#);
    assert_eq!(code(&psikit(&["solve", "--config", s(&ring)])), 2);
}

#[test]
fn annulus_counts_and_errors() {
    let one = json(&psikit(&["annulus", "--n", "2", "--rings", "1,2"]));
    let r = one["critical_radii"].as_array().unwrap();
    assert_eq!(r.len(), 1);
    assert!(num(&r[0]) > 1.0 && num(&r[0]) < 2.0);
    let two = json(&psikit(&["annulus", "--n", "2", "--rings", "1,2;3,4"]));
    let r: Vec<f64> = two["critical_radii"].as_array().unwrap().iter().map(num).collect();
    assert_eq!(r.len(), 2);
    assert!(r[0] > 1.0 && r[0] < 2.0 && r[1] > 3.0 && r[1] < 4.0);
    assert_eq!(two["series_terms_used"].as_array().unwrap().len(), 2);

    assert_eq!(code(&psikit(&["annulus", "--rings", "2,1"])), 2);
    assert_eq!(code(&psikit(&["annulus", "--rings", "1,2;1.5,3"])), 2);
    assert_eq!(code(&psikit(&["annulus", "--rings", "1;2"])), 2);
    assert_eq!(code(&psikit(&["annulus", "--rings", "1,2", "--terms", "2"])), 4);
}

fn read_column(path: &Path, name: &str) -> Vec<f64> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let idx = rdr.headers().unwrap().iter().position(|h| h == name).unwrap();
    rdr.records().map(|r| r.unwrap()[idx].parse::<f64>().unwrap()).collect()
}

#[test]
fn sweep_ball_is_increasing() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "ball.json", BALL);
    let out = dir.path().join("sweep.csv");
    assert_eq!(
        code(&psikit(&[
            "sweep",
            "--config",
            s(&cfg),
            "--from",
            "0,0",
            "--to",
            "0.9,0",
            "--samples",
            "50",
            "--out",
            s(&out)
        ])),
        0
    );
    let psi = read_column(&out, "psi");
    assert_eq!(psi.len(), 50);
    assert!(psi.windows(2).all(|w| w[1] > w[0]));
    assert!(read_column(&out, "grad_norm").iter().all(|g| g.is_finite()));
}

#[test]
fn sweep_annulus_is_convex() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "ring.json",
        r#"{"shape": "multi_annulus", "center": [0, 0], "rings": [[1, 2]], "quadrature": {"kind": "circle", "degree": 8192}}"#,
    );
    let out = dir.path().join("ring.csv");
    assert_eq!(
        code(&psikit(&[
            "sweep",
            "--config",
            s(&cfg),
            "--from",
            "1.05,0",
            "--to",
            "1.95,0",
            "--samples",
            "40",
            "--out",
            s(&out)
        ])),
        0
    );
    let psi = read_column(&out, "psi");
    assert!(psi.windows(3).all(|w| w[0] - 2.0 * w[1] + w[2] > 0.0));
}

#[test]
fn sweep_single_row_and_exits() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "ball.json", BALL);
    let out = dir.path().join("one.csv");
    assert_eq!(
        code(&psikit(&[
            "sweep",
            "--config",
            s(&cfg),
            "--from",
            "0.1,0.2",
            "--to",
            "0.5,0",
            "--samples",
            "1",
            "--out",
            s(&out)
        ])),
        0
    );
    assert_eq!(read_column(&out, "x0"), vec![0.1]);
    assert_eq!(read_column(&out, "x1"), vec![0.2]);

    // the chord between two interior points of a ring crosses the hole
    let ring = write(&dir, "ring.json", r#"{"shape": "multi_annulus", "center": [0, 0], "rings": [[1, 2]]}"#);
    let bad = dir.path().join("bad.csv");
    assert_eq!(
        code(&psikit(&["sweep", "--config", s(&ring), "--from", "1.5,0", "--to", "-1.5,0", "--out", s(&bad)])),
        3
    );
    assert_eq!(code(&psikit(&["sweep", "--config", s(&cfg), "--from", "0,0", "--to", "1.5,0", "--out", s(&bad)])), 3);
}

#[test]
fn oracle_modes() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "e.json", ELLIPSE);
    let doc =
        json(&psikit(&["oracle", "--config", s(&cfg), "--point", "0.5,0.2", "--samples", "262144", "--seed", "4"]));
    assert_eq!(doc["agrees"], true);
    let ball = json(&psikit(&["oracle", "--ball-radius", "1", "--radius", "0.5", "--n", "3"]));
    assert!(num(&ball["psi_prime"]) > 0.0);
    assert_eq!(code(&psikit(&["oracle", "--ball-radius", "1", "--radius", "1.5"])), 2);
    assert_eq!(code(&psikit(&["oracle", "--config", s(&cfg), "--point", "0.5,0.2", "--r-out", "1"])), 2);
    assert_eq!(code(&psikit(&["oracle", "--config", s(&cfg), "--point", "5,0"])), 3);
}

#[test]
fn check_suites() {
    for (suite, seed) in [("concavity", "0"), ("gegenbauer", "0"), ("oracle", "7")] {
        let out = psikit(&["check", "--suite", suite, "--seed", seed]);
        let text = String::from_utf8_lossy(&out.stdout);
        assert_eq!(code(&out), 0, "{text}");
        assert!(text.lines().all(|l| !l.starts_with("FAIL")));
    }
    let a = psikit(&["check", "--suite", "translation", "--seed", "5"]);
    let b = psikit(&["check", "--suite", "translation", "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(code(&psikit(&["check", "--suite", "nonsense"])), 2);
}
