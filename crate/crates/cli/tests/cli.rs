use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_henon-tm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn candidate_report_has_schema_and_total() {
    let out = run(&["candidate", "--alpha", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "candidate");
    let total = v["result"]["total"].as_f64().unwrap();
    assert!((total - 3.794440842284582).abs() < 1e-9, "{total}");
    assert_eq!(v["result"]["beats_bound"], true);
}

#[test]
fn evaluate_zero_profile_gives_zero() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "zero.csv", "r,u\n0,0\n0.5,0\n1,0\n");
    let out = run(&["evaluate", "--profile", &p, "--alpha", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["result"]["functional"].as_f64(), Some(0.0));
}

#[test]
fn malformed_profile_is_reported_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "bad.csv", "r,u\n0,0.2\n0.5,abc\n1,0\n");
    let out = run(&["evaluate", "--profile", &p]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
}

#[test]
fn missing_file_is_an_io_error() {
    let out = run(&["evaluate", "--profile", "/nonexistent/profile.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("i/o error"));
}

#[test]
fn supercritical_gamma_is_rejected() {
    let out = run(&["optimize", "--gamma-factor", "1.5", "--grid", "65"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("precondition violated"));
}

#[test]
fn negative_alpha_is_rejected() {
    let out = run(&["candidate", "--alpha", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn optimizer_without_convergence_exits_3_with_best_value() {
    let out = run(&["optimize", "--grid", "129", "--max-iters", "1"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["result"]["converged"], false);
    assert!(v["result"]["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn optimizer_reaches_known_level() {
    let out = run(&["optimize", "--alpha", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let value = json(&out)["result"]["value"].as_f64().unwrap();
    assert!(value >= 8.77, "{value}");
}

#[test]
fn threshold_brackets_sign_change() {
    let out = run(&["threshold", "--tol", "1e-4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let a = v["result"]["alpha_star_estimate"].as_f64().unwrap();
    assert!((0.0115..0.0125).contains(&a), "{a}");
    assert!(v["result"]["margin_at_zero"].as_f64().unwrap() > 0.0);
}

#[test]
fn sweep_rows_follow_input_order() {
    let out = run(&["sweep", "--alphas", "2,0,1", "--grid", "257", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let header = rdr.headers().unwrap().clone();
    assert_eq!(&header[0], "alpha");
    let alphas: Vec<f64> = rdr
        .records()
        .map(|r| r.unwrap()[0].parse().unwrap())
        .collect();
    assert_eq!(alphas, vec![2.0, 0.0, 1.0]);
}

#[test]
fn empty_sweep_is_rejected() {
    let out = run(&["sweep", "--alphas", ""]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = run(&["sweep", "--alphas", "0,1", "--grid", "257", "--output", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn rearrange_sample_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("nr,ntheta\n5,4\n");
    for i in 0..5 {
        let v = if i == 4 { 0.0 } else { 0.4 * (1.0 - i as f64 / 4.0) };
        let row = vec![format!("{v}"); 4].join(",");
        text.push_str(&row);
        text.push('\n');
    }
    let p = write(dir.path(), "s.csv", &text);
    let out = run(&["rearrange", "--sample", &p, "--alpha", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(json(&out)["command"], "rearrange");
}

#[test]
fn transform_round_trip_via_cli() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "u.csv", "r,u\n0,0.3\n0.5,0.1\n1,0\n");
    let fwd = dir.path().join("v.csv");
    let out = run(&[
        "transform", "--profile", &p, "--map", "ssw", "--alpha", "2", "--format", "csv",
        "--output", fwd.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(std::fs::read_to_string(&fwd).unwrap().lines().count() > 3);
}

#[test]
fn verify_passes() {
    let out = run(&["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}
