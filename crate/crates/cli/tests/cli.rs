use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn circuit(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../circuits").join(name)
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("qgrad-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

fn qgrad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgrad"))
        .args(args)
        .env_remove("QGRAD_SEED")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn grad_ry() {
    let path = circuit("ry.qc");
    let out = json(&qgrad(&["grad", "--method", "auto", "--params", "0.7", path.to_str().unwrap()]));
    assert_eq!(out["schema_version"], 1);
    assert_eq!(out["command"], "grad");
    assert!((f(&out["value"]) - 0.7f64.cos()).abs() < 1e-14);
    assert!((f(&out["gradient"][0]) + 0.7f64.sin()).abs() < 1e-14);
    assert_eq!(out["per_param_method"][0], "shift");
    assert_eq!(out["evaluations"], 3);
}

#[test]
fn floats_carry_seventeen_digits() {
    let path = circuit("ry.qc");
    let out = qgrad(&["eval", "--params", "0.7", path.to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"value\":7.6484218728448850e-1"), "{text}");
}

#[test]
fn grad_cross_resonance_auto_uses_lcu() {
    let path = circuit("cross_resonance.qc");
    let p = path.to_str().unwrap();
    let auto = json(&qgrad(&["grad", "--params", "0.4,-0.8", p]));
    let exact = json(&qgrad(&["grad", "--method", "exact", "--params", "0.4,-0.8", p]));
    assert_eq!(auto["per_param_method"][0], "lcu");
    assert_eq!(auto["per_param_method"][1], "shift");
    for k in 0..2 {
        assert!((f(&auto["gradient"][k]) - f(&exact["gradient"][k])).abs() < 1e-9);
    }
}

#[test]
fn check_cross_resonance() {
    let path = circuit("cross_resonance.qc");
    let out = json(&qgrad(&["check", path.to_str().unwrap()]));
    assert_eq!(out["params"][0]["summary"], "4 eigenvalue clusters; shift rule inapplicable; LCU selected");
    assert_eq!(out["params"][0]["occurrences"][0]["eigenvalues"].as_array().unwrap().len(), 4);
    assert!(out.get("gradient").is_none());
    assert_eq!(out["evaluations"], 0);
}

#[test]
fn check_cubic_phase_reports_heisenberg() {
    let path = circuit("cubic_phase.qc");
    let out = json(&qgrad(&["check", path.to_str().unwrap()]));
    assert_eq!(out["params"][0]["method"], "cv-heisenberg");
    let rule = out["params"][0]["occurrences"][0]["rule"].as_array().unwrap();
    assert_eq!(rule.len(), 2);
}

#[test]
fn sample_is_byte_identical() {
    let path = circuit("ry.qc");
    let args = ["sample", "--shots", "10000", "--seed", "7", "--params", "0.9", path.to_str().unwrap()];
    let a = qgrad(&args);
    let b = qgrad(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let out = json(&a);
    assert_eq!(out["shots"], 10000);
    assert_eq!(out["seed"], 7);
    assert!((f(&out["value"]) - 0.9f64.cos()).abs() < 5.0 * f(&out["stderr"]));
}

#[test]
fn seed_falls_back_to_environment() {
    let path = circuit("ry.qc");
    let p = path.to_str().unwrap();
    let from_env = Command::new(env!("CARGO_BIN_EXE_qgrad"))
        .args(["sample", "--shots", "500", "--params", "0.9", p])
        .env("QGRAD_SEED", "11")
        .output()
        .unwrap();
    let explicit = qgrad(&["sample", "--shots", "500", "--seed", "11", "--params", "0.9", p]);
    assert_eq!(from_env.stdout, explicit.stdout);
}

#[test]
fn optimize_with_no_steps() {
    let path = circuit("ry.qc");
    let out = json(&qgrad(&["optimize", "--steps", "0", "--params", "0.3", path.to_str().unwrap()]));
    let trace = out["trace"].as_array().unwrap();
    assert_eq!(trace.len(), 1);
    assert_eq!(trace[0]["step"], 0);
    assert!((f(&trace[0]["theta"][0]) - 0.3).abs() < 1e-15);
}

#[test]
fn optimize_ry_reaches_minimum() {
    let path = circuit("ry.qc");
    let out = json(&qgrad(&["optimize", "--lr", "0.1", "--steps", "200", "--params", "0.3", path.to_str().unwrap()]));
    assert!((f(&out["value"]) + 1.0).abs() < 1e-3);
    let trace = out["trace"].as_array().unwrap();
    assert_eq!(trace.len(), 201);
    let values: Vec<f64> = trace.iter().map(|r| f(&r["value"])).collect();
    assert!(values.windows(2).all(|w| w[1] <= w[0] + 1e-15));
}

#[test]
fn optimize_displaced_vacuum() {
    let path = circuit("displaced_vacuum.qc");
    let out = json(&qgrad(&["optimize", "--lr", "0.05", "--steps", "200", "--params", "0.8", path.to_str().unwrap()]));
    assert!((f(&out["value"]) - 1.0).abs() < 1e-8);
}

#[test]
fn parse_error_exits_one() {
    let path = scratch("bad.qc", "platform qubit\nwires 1\ngate RQ 0 th[0]\nobserve 1 Z0\n");
    let out = qgrad(&["eval", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("line 3"), "{msg}");
}

#[test]
fn bad_arguments_exit_one() {
    let path = circuit("ry.qc");
    let p = path.to_str().unwrap();
    assert_eq!(qgrad(&["grad", "--params", "0.1,0.2", p]).status.code(), Some(1));
    assert_eq!(qgrad(&["grad", "--method", "newton", p]).status.code(), Some(1));
    assert_eq!(qgrad(&["grad", "--params", "abc", p]).status.code(), Some(1));
    assert_eq!(qgrad(&["eval", "/nonexistent/circuit.qc"]).status.code(), Some(1));
    assert_eq!(qgrad(&["frobnicate", p]).status.code(), Some(1));
    assert_eq!(qgrad(&["--help"]).status.code(), Some(0));
}

#[test]
fn inapplicable_method_exits_two() {
    let cr = circuit("cross_resonance.qc");
    let out = qgrad(&["grad", "--method", "shift", cr.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let cubic = circuit("cubic_phase.qc");
    let out = qgrad(&["grad", "--method", "cv-shift", "--params", "0.2,0.1", cubic.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn degree_overflow_exits_three() {
    let path = scratch("deep.qc", "platform cv\nwires 1\ngate V 0 0.1\ngate V 0 0.1\ngate V 0 0.1\nobserve 1 p0^2\n");
    let out = qgrad(&["eval", "--max-degree", "3", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("CUBICPHASE"));
}
