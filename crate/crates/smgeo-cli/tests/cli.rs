//! Exit-code contract, golden values, and output hygiene of the binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn smgeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smgeo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_spec(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn catenary_ivp_matches_closed_form() {
    let out = smgeo(&[
        "catenary", "--alpha", "1", "--f0", "1", "--df0", "0", "--from", "0", "--to", "1",
        "--step", "1e-3",
    ]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let last = text.lines().last().unwrap();
    let f: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert!((f - 1.5430806).abs() < 1e-7, "f(1) = {f}");
}

#[test]
fn catenary_alpha_zero_is_linear() {
    let out = smgeo(&[
        "catenary", "--alpha", "0", "--f0", "1", "--df0", "2", "--from", "0", "--to", "1",
        "--step", "0.01",
    ]);
    assert!(out.status.success());
    for line in stdout_str(&out).lines().skip(1) {
        let mut cols = line.split(',');
        let s: f64 = cols.next().unwrap().parse().unwrap();
        let f: f64 = cols.next().unwrap().parse().unwrap();
        assert!((f - (1.0 + 2.0 * s)).abs() < 1e-12);
    }
}

#[test]
fn catenary_rejects_nonpositive_start_with_exit_2() {
    let out = smgeo(&[
        "catenary", "--alpha", "1", "--f0", "-1", "--df0", "0", "--from", "0", "--to", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn catenary_singularity_exits_3() {
    let out = smgeo(&[
        "catenary", "--alpha", "-1", "--f0", "0.05", "--df0", "-1", "--from", "0", "--to", "1",
        "--step", "1e-4",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn catenary_bvp_with_fit_recovers_lambda_one() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bvp.csv");
    let out = smgeo(&[
        "catenary",
        "--alpha",
        "1",
        "--f0",
        "1.5430806348152437",
        "--f-end",
        "1.5430806348152437",
        "--from",
        "-1",
        "--to",
        "1",
        "--fit",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let fit_line = stdout_str(&out);
    assert!(fit_line.contains("lambda = "), "got: {fit_line}");
    let lambda: f64 = fit_line
        .split("lambda = ")
        .nth(1)
        .unwrap()
        .split(',')
        .next()
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!((lambda - 1.0).abs() < 1e-6, "lambda = {lambda}");
}

const AFFINE_GOLDEN_SPEC: &str = r#"{
  "family": "affine",
  "alpha": 1.0,
  "functions": [
    {"kind": "poly", "coeffs": [0.0, 0.0, 1.0]},
    {"kind": "poly", "coeffs": [0.0, 0.0, 1.0]}
  ],
  "domain": [[1.0, 2.0], [1.0, 2.0]],
  "grid": [20, 20],
  "options": {"c": 1.0}
}"#;

// frozen from the first oracle run and confirmed against an independent
// brute-force evaluation of the affine equation
const AFFINE_GOLDEN_RMS: f64 = 0.7650434031783117;
const AFFINE_GOLDEN_MAX: f64 = 1.1014807792864378;

#[test]
fn residual_affine_summary_matches_frozen_golden() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "affine.json", AFFINE_GOLDEN_SPEC);
    let out = smgeo(&["residual", "--spec", &spec]);
    assert!(out.status.success());
    let summary: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let rms = summary["rms"].as_f64().unwrap();
    let max_abs = summary["max_abs"].as_f64().unwrap();
    assert!(
        (rms - AFFINE_GOLDEN_RMS).abs() < 1e-12 * AFFINE_GOLDEN_RMS,
        "rms {rms}"
    );
    assert!(
        (max_abs - AFFINE_GOLDEN_MAX).abs() < 1e-12 * AFFINE_GOLDEN_MAX,
        "max {max_abs}"
    );
    assert_eq!(summary["samples"].as_u64(), Some(400));
    assert_eq!(summary["domain_violations"].as_u64(), Some(0));
}

#[test]
fn residual_hyperplane_rms_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "plane.json",
        r#"{
          "family": "translation",
          "alpha": 1.5,
          "functions": [
            {"kind": "linear", "slope": 0.0, "intercept": 0.0},
            {"kind": "linear", "slope": 3.0, "intercept": 1.0}
          ],
          "domain": [[0.5, 2.5], [-1.0, 1.0]],
          "grid": [10, 10]
        }"#,
    );
    let out = smgeo(&["residual", "--spec", &spec]);
    assert!(out.status.success());
    let summary: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(summary["rms"].as_f64(), Some(0.0));
    assert_eq!(summary["max_abs"].as_f64(), Some(0.0));
}

#[test]
fn residual_reports_domain_violations_with_exit_0() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "violations.json",
        r#"{
          "family": "translation",
          "alpha": 1.0,
          "functions": [
            {"kind": "poly", "coeffs": [0.0, 0.0, 1.0]},
            {"kind": "linear", "slope": 1.0, "intercept": 0.0}
          ],
          "domain": [[-0.5, 1.0], [0.0, 1.0]],
          "grid": [4, 3]
        }"#,
    );
    let out = smgeo(&["residual", "--spec", &spec]);
    assert!(out.status.success());
    let summary: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(summary["domain_violations"].as_u64(), Some(6));
    assert_eq!(summary["samples"].as_u64(), Some(6));
}

#[test]
fn residual_schema_violation_exits_2_without_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "bad.json",
        r#"{"family": "translation", "alpha": 1.0}"#,
    );
    let csv = dir.path().join("out.csv");
    let summary = dir.path().join("summary.json");
    let out = smgeo(&[
        "residual",
        "--spec",
        &spec,
        "--out-csv",
        csv.to_str().unwrap(),
        "--out-summary",
        summary.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!csv.exists(), "partial CSV left behind");
    assert!(!summary.exists(), "partial summary left behind");
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("error:"), "stderr: {err}");
}

#[test]
fn minimize_catenary_boundary_problem() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "min.json",
        r#"{
          "n": 1,
          "alpha": 1.0,
          "u": "vertical",
          "domain": [[-1.0, 1.0]],
          "grid": [202],
          "boundary": {"left": 1.5430806348152437, "right": 1.5430806348152437}
        }"#,
    );
    let field = dir.path().join("field.csv");
    let report = dir.path().join("report.json");
    let out = smgeo(&[
        "minimize",
        "--spec",
        &spec,
        "--out-field",
        field.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(report["converged"].as_bool(), Some(true));
    assert!(report["el_residual_rms"].as_f64().unwrap() < 5e-3);
    // the field CSV holds the converged catenary
    let csv = fs::read_to_string(&field).unwrap();
    for line in csv.lines().skip(1) {
        let mut cols = line.split(',');
        let x: f64 = cols.next().unwrap().parse().unwrap();
        let v: f64 = cols.next().unwrap().parse().unwrap();
        assert!((v - x.cosh()).abs() < 1e-3, "field off at {x}: {v}");
    }
}

#[test]
fn minimize_alpha_zero_yields_straight_line() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "line.json",
        r#"{
          "n": 1,
          "alpha": 0.0,
          "u": "vertical",
          "domain": [[0.0, 1.0]],
          "grid": [21],
          "boundary": {"left": 1.0, "right": 2.0}
        }"#,
    );
    let out = smgeo(&["minimize", "--spec", &spec, "--report", "-"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report["converged"].as_bool(), Some(true));
}

#[test]
fn minimize_infeasible_boundary_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "bad.json",
        r#"{
          "n": 1,
          "alpha": 1.0,
          "u": "vertical",
          "domain": [[-1.0, 1.0]],
          "grid": [21],
          "boundary": {"left": -1.0, "right": 1.0}
        }"#,
    );
    let out = smgeo(&["minimize", "--spec", &spec]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn minimize_iteration_stop_exits_3_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "stop.json",
        r#"{
          "n": 1,
          "alpha": 1.0,
          "u": "vertical",
          "domain": [[-1.0, 1.0]],
          "grid": [102],
          "boundary": {"left": 1.5430806348152437, "right": 1.5430806348152437},
          "options": {"max_iterations": 2}
        }"#,
    );
    let report = dir.path().join("report.json");
    let out = smgeo(&[
        "minimize",
        "--spec",
        &spec,
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(report["converged"].as_bool(), Some(false));
    assert_eq!(report["iterations"].as_u64(), Some(2));
}

#[test]
fn classify_cylinder_spec_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "cyl.json",
        r#"{
          "family": "cylinder",
          "alpha": 1.0,
          "u": [0.0, 0.0, 1.0],
          "functions": [{"kind": "cosh"}],
          "domain": [[-1.0, 1.0], [-1.0, 1.0]],
          "grid": [201, 5],
          "options": {
            "rulings": [[0.0, 1.0, 0.0]],
            "plane": [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]
          }
        }"#,
    );
    let out = smgeo(&["classify", "--spec", &spec]);
    assert!(out.status.success());
    let verdict: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(verdict["verdict"].as_str(), Some("AlphaCatenaryCylinder"));
    let fit = &verdict["evidence"]["catenary_fit"];
    assert!((fit["lambda"].as_f64().unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn classify_plane_spec_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "plane.json",
        r#"{
          "family": "translation",
          "alpha": 1.0,
          "functions": [
            {"kind": "linear", "slope": 0.0, "intercept": 0.5},
            {"kind": "linear", "slope": -2.0, "intercept": 0.0}
          ],
          "domain": [[0.5, 2.5], [-1.0, 1.0]],
          "grid": [9, 9]
        }"#,
    );
    let out = smgeo(&["classify", "--spec", &spec]);
    assert!(out.status.success());
    let verdict: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(verdict["verdict"].as_str(), Some("Hyperplane"));
}

#[test]
fn classify_sweep_flags_nothing_on_translation_family() {
    let out = smgeo(&[
        "classify", "--sweep", "25", "--family", "translation", "--alpha", "1", "--seed", "42",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report["not_singular_minimal"].as_u64(), Some(25));
    assert_eq!(
        report["counterexamples"].as_array().map(Vec::len),
        Some(0)
    );
}

#[test]
fn classify_unknown_family_exits_2() {
    let out = smgeo(&[
        "classify", "--sweep", "5", "--family", "moebius", "--alpha", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
