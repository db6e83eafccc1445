use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qcurrent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcurrent"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn report_without_timing(dir: &Path) -> Value {
    let text = fs::read_to_string(dir.join("report.json")).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v.as_object_mut().unwrap().remove("timing");
    v
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL: &str = r#"{
  "spin_max": 3.0,
  "samples": 10,
  "coherent_samples": 3,
  "radial_order": 3,
  "angular_order": 4,
  "rep_degree": 16
}"#;

#[test]
fn default_algebra_suite_passes() {
    let o = qcurrent(&["verify-algebra"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["passed"], true);
    assert_eq!(v["suites"][0]["suite"], "verify_algebra");
}

#[test]
fn classical_q_passes() {
    let o = qcurrent(&["verify-algebra", "--q", "1"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    // Same output directory, so the config echo is identical too.
    let out = tmp.path().join("out");
    let mut runs = Vec::new();
    let mut raw = Vec::new();
    for _ in 0..2 {
        let o = qcurrent(&["report-all", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert!(matches!(code(&o), 0 | 1), "{}", String::from_utf8_lossy(&o.stderr));
        runs.push(report_without_timing(&out));
        raw.push(fs::read_to_string(out.join("report.json")).unwrap());
    }
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0]["suites"].as_array().unwrap().len(), 4);
    let strip = |t: &str| t.split("\n  \"timing\"").next().unwrap().to_string();
    assert_eq!(strip(&raw[0]), strip(&raw[1]));
    let raw: Value = serde_json::from_str(&raw[0]).unwrap();
    assert!(raw["timing"]["started_unix"].as_f64().unwrap() > 0.0);
}

#[test]
fn seed_changes_random_suites() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    qcurrent(&["verify-cocycle", "--config", &cfg, "--seed", "1", "--out", a.to_str().unwrap()]);
    qcurrent(&["verify-cocycle", "--config", &cfg, "--seed", "2", "--out", b.to_str().unwrap()]);
    assert_ne!(report_without_timing(&a)["suites"], report_without_timing(&b)["suites"]);
}

#[test]
fn overall_flag_matches_checks_and_exit_status() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), r#"{"spin_max": 2.0, "tolerances": {"commutator": 0.0}}"#);
    let o = qcurrent(&["verify-algebra", "--config", &cfg]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], false);
    let checks = v["suites"][0]["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["passed"] == false));
    assert_eq!(
        v["suites"][0]["passed"].as_bool().unwrap(),
        checks.iter().all(|c| c["passed"] == true)
    );
}

#[test]
fn spin_above_cap_is_a_configuration_error() {
    let o = qcurrent(&["verify-algebra", "--spin-max", "40"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("dim_cap"));
}

#[test]
fn bad_configs_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let unknown = write_config(tmp.path(), r#"{"spin": 1}"#);
    assert_eq!(code(&qcurrent(&["verify-algebra", "--config", &unknown])), 2);
    assert_eq!(code(&qcurrent(&["verify-algebra", "--config", "/nonexistent/cfg.json"])), 2);
    assert_eq!(code(&qcurrent(&["verify-algebra", "--fd-step", "-1"])), 2);
    assert_eq!(code(&qcurrent(&["verify-algebra", "--q", "0"])), 2);
    assert_eq!(code(&qcurrent(&["verify-algebra", "--spin-max", "1/3"])), 2);
}

#[test]
fn config_round_trips_and_flags_win() {
    let tmp = tempfile::tempdir().unwrap();
    let shown = qcurrent(&["show-config"]);
    assert_eq!(code(&shown), 0);
    let cfg = write_config(tmp.path(), std::str::from_utf8(&shown.stdout).unwrap());
    let again = qcurrent(&["show-config", "--config", &cfg]);
    assert_eq!(shown.stdout, again.stdout);

    let cfg = write_config(tmp.path(), r#"{"seed": 5, "bergman_degree": 32}"#);
    let o = qcurrent(&["show-config", "--config", &cfg, "--seed", "9", "--spin-max", "25/2"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["seed"], 9);
    assert_eq!(v["bergman_degree"], 32);
    assert_eq!(v["spin_max"], 12.5);
}

#[test]
fn config_echo_reproduces_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let a = tmp.path().join("a");
    qcurrent(&["verify-cocycle", "--config", &cfg, "--seed", "3", "--out", a.to_str().unwrap()]);
    let first = report_without_timing(&a);
    let echo = write_config(tmp.path(), &serde_json::to_string(&first["config"]).unwrap());
    let b = tmp.path().join("b");
    qcurrent(&["verify-cocycle", "--config", &echo, "--out", b.to_str().unwrap()]);
    let mut second = report_without_timing(&b);
    second["config"]["out_dir"] = first["config"]["out_dir"].clone();
    assert_eq!(first, second);
}

#[test]
fn csv_tables_are_written() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = qcurrent(&["verify-algebra", "--spin-max", "2", "--out", out.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code(&o), 0);
    assert!(!out.join("report.json").exists());
    let table = fs::read_to_string(out.join("verify_algebra_irrep_classical_limit.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("parameter,value,residual"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn mesh_dump() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("mesh.csv");
    let o = qcurrent(&[
        "verify-algebra",
        "--spin-max",
        "1",
        "--radial-order",
        "2",
        "--angular-order",
        "3",
        "--dump-mesh",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("node_re,node_im,weight,tf0_constant_1_re"));
    let weights: f64 = lines.map(|l| l.split(',').nth(2).unwrap().parse::<f64>().unwrap()).sum();
    assert!((weights - std::f64::consts::PI).abs() < 1e-12);
}
