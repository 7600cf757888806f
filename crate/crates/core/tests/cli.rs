use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ellis-envelope"))
        .args(args)
        .env_remove("ELLIS_ENVELOPE_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn full_matrix_algebra_has_full_rank() {
    let m2 = data("m2.json");
    let out = run(&["envelope", "compute", m2.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["certificate"], "certified");
    assert_eq!(v["rank"], 4);
    assert_eq!(v["mode_used"], "system");
}

#[test]
fn semigroup_enumeration_reports_no_failures() {
    let out = run(&["semigroup", "enumerate", "--order", "2", "--check", "lemma2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["tables"], 8);
    assert_eq!(v["checks"]["lemma2"]["failures"], 0);
}

#[test]
fn semigroup_analysis_of_t3() {
    let t3 = data("t3.json");
    let out = run(&["semigroup", "analyze", t3.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["certificate"], "certified");
}

#[test]
fn transpose_is_not_cp_and_has_cb_norm_two() {
    let t = data("transpose.json");
    let out = run(&["channel", "info", t.to_str().unwrap(), "--cb"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["flags"]["cp"], false);
    let cb = v["flags"]["cb_norm"]["upper"].as_f64().or(v["flags"]["cb_norm"].as_f64()).unwrap();
    assert!((cb - 2.0).abs() < 1e-3, "{cb}");
}

#[test]
fn boundary_of_sign_conjugation() {
    let ch = data("sign_conjugation.json");
    let fix = data("scalars2.json");
    let out = run(&["boundary", "compute", ch.to_str().unwrap(), "--fix", fix.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["certificate"], "certified");
}

#[test]
fn malformed_input_names_the_json_path() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"ambient": 2, "basis": [{"rows": 2, "cols": 2, "data": "oops"}], "mode": "system"}"#).unwrap();
    let out = run(&["envelope", "compute", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("basis[0].data"), "{err}");
}

#[test]
fn invalid_tolerances_are_rejected() {
    let m2 = data("m2.json");
    let out = run(&["envelope", "compute", m2.to_str().unwrap(), "--tol", "1e-3", "--report-tol", "1e-6"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exhausted_projection_budget_is_unverified() {
    let d2 = data("d2.json");
    let out = run(&["envelope", "compute", d2.to_str().unwrap(), "--projection-budget", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["certificate"], "unverified");
}

#[test]
fn thread_variable_overrides_flag_without_changing_output() {
    let d3 = data("d3.json");
    let base = run(&["--parallel", "1", "envelope", "compute", d3.to_str().unwrap()]);
    let env = Command::new(env!("CARGO_BIN_EXE_ellis-envelope"))
        .args(["--parallel", "1", "envelope", "compute", d3.to_str().unwrap()])
        .env("ELLIS_ENVELOPE_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(0));
    assert_eq!(base.stdout, env.stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_ellis-envelope"))
        .args(["envelope", "compute", d3.to_str().unwrap()])
        .env("ELLIS_ENVELOPE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.json");
    let d2 = data("d2.json");
    let out = run(&["envelope", "compute", d2.to_str().unwrap(), "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(v["rank"], 2);
}

#[test]
fn semigroup_checks_accept_a_list() {
    let out = run(&["semigroup", "enumerate", "--order", "3", "--check", "lemma2,remark"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["tables"], 113);
    let checks = v["checks"].as_object().unwrap();
    assert_eq!(checks.keys().collect::<Vec<_>>(), ["lemma2", "remark"]);
    assert!(checks.values().all(|c| c["failures"] == 0));
}
