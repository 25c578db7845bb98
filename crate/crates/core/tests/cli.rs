use std::path::PathBuf;
use std::process::{Command, Output};

use geoverify::ModelConfig;
use tempfile::TempDir;

fn geoverify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geoverify"))
        .args(args)
        .env("GEOVERIFY_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn scratch(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

#[test]
fn verify_metric_passes() {
    let o = geoverify(&["verify", "metric"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("metric.r_value_at_torus"));
}

#[test]
fn verify_json_is_a_suite_report() {
    let dir = TempDir::new().unwrap();
    let out = scratch(&dir, "metric.json");
    let o = geoverify(&["verify", "--suite", "metric", "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["suite"], "metric");
    assert_eq!(v["pass"], true);
    let file: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(file, v);
}

#[test]
fn unknown_suite_is_a_usage_error() {
    assert_eq!(geoverify(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(geoverify(&["verify", "metric", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(geoverify(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn box_violation_names_the_condition() {
    let dir = TempDir::new().unwrap();
    let mut cfg = ModelConfig::default();
    cfg.bump.rho[0] = 0.3;
    let path = scratch(&dir, "bad.json");
    std::fs::write(&path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let o = geoverify(&["verify", "metric", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("(R1)"));
}

#[test]
fn malformed_config_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let path = scratch(&dir, "garbage.json");
    std::fs::write(&path, "{ not json").unwrap();
    assert_eq!(geoverify(&["verify", "metric", "--config", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(geoverify(&["verify", "metric", "--config", "/nonexistent/cfg.json"]).status.code(), Some(2));
}

#[test]
fn invalid_thread_cap_is_a_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_geoverify"))
        .args(["verify", "metric"])
        .env("GEOVERIFY_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn foliation_trace_stays_on_torus() {
    let o = geoverify(&["trace", "--foliation", "--t", "1", "--step", "0.01"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "t,rho,psi,phi,theta,x1,x2,x3,x4,energy,d2");
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 101);
    for r in &rows {
        assert!((r[1] - 1.0).abs() < 1e-6);
        assert!((r[2] - std::f64::consts::FRAC_PI_4).abs() < 1e-6);
        assert!((r[10] - 1.0).abs() < 1e-6);
    }
}

#[test]
fn ambient_trace_through_origin_is_straight() {
    let o = geoverify(&["trace", "--ambient", "0,0,0,0", "--vel", "1,0,0,0", "--t", "5", "--step", "0.01"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    let last = rows.last().unwrap();
    assert!(last[0] < 5.0);
    assert!(last[10] <= 4.0 + 1e-9);
    for r in &rows {
        assert!((r[5] - r[0]).abs() < 1e-9);
        assert!(r[6].abs() < 1e-12 && r[7].abs() < 1e-12 && r[8].abs() < 1e-12);
    }
    assert!(rows[0][1].is_nan());
}

#[test]
fn trace_rejects_bad_input() {
    assert_eq!(geoverify(&["trace", "--chart", "1,2"]).status.code(), Some(2));
    assert_eq!(geoverify(&["trace"]).status.code(), Some(2));
    assert_eq!(geoverify(&["trace", "--foliation", "--t", "-1"]).status.code(), Some(2));
}

#[test]
fn verify_is_deterministic() {
    let a = geoverify(&["verify", "convexity", "--format", "json", "--seed", "7"]);
    let b = geoverify(&["verify", "convexity", "--format", "json", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn rational_control_suite() {
    let o = geoverify(&["verify", "geodesics", "--alpha-rational", "1", "--seeds", "20", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let checks = v["checks"].as_array().unwrap();
    let closes = checks.iter().find(|c| c["id"] == "geodesics.control_closes").unwrap();
    assert_eq!(closes["pass"], true);
}

#[test]
fn report_requires_inputs() {
    let dir = TempDir::new().unwrap();
    assert_eq!(geoverify(&["report"]).status.code(), Some(2));
    let bad = scratch(&dir, "not-a-report.json");
    std::fs::write(&bad, "[]").unwrap();
    assert_eq!(geoverify(&["report", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn report_is_idempotent_under_duplicates() {
    let dir = TempDir::new().unwrap();
    let json = scratch(&dir, "metric-dup.json");
    let o = geoverify(&["verify", "metric", "--out", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let p = json.to_str().unwrap();
    let once = geoverify(&["report", p]);
    let twice = geoverify(&["report", p, p]);
    assert_eq!(once.status.code(), Some(0));
    assert_eq!(twice.status.code(), Some(0));
    assert_eq!(once.stdout, twice.stdout);
    assert!(!twice.stderr.is_empty());
    assert!(stdout(&once).contains("## Pass matrix"));
}
