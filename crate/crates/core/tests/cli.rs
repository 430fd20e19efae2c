use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use weakot::catalog::{build_cks, build_trivial};
use weakot::cli::{render_verify, run};
use weakot::qcore::{fidelity, DensityOp};
use weakot::verify::{run_all_with, Primitives};

fn weakot(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weakot")).args(args).current_dir(dir).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn close(v: &Value, k: &str, target: f64) {
    let x = v[k].as_f64().unwrap_or_else(|| panic!("no field {k}"));
    assert!((x - target).abs() < 1e-6, "{k} = {x}, expected {target}");
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect()
}

#[test]
fn analyze_builtins() {
    let dir = tempfile::tempdir().unwrap();
    let cks = weakot(&["analyze", "cks"], dir.path());
    assert_eq!(cks.status.code(), Some(0));
    let v = json(&cks);
    close(&v, "alice_bound", 0.5);
    close(&v, "bob_bound", 0.75);
    for k in ["spec_name", "delta", "f", "bob_sim_s0", "bob_sim_s1", "theorem1_lhs"] {
        assert!(v.get(k).is_some(), "missing {k}");
    }
    let t = json(&weakot(&["analyze", "trivial"], dir.path()));
    close(&t, "alice_bound", 1.0);
    close(&t, "bob_bound", 0.5);
}

#[test]
fn analyze_csv_has_one_row() {
    let out = run(["weakot", "analyze", "cks", "--format", "csv"]);
    assert_eq!(out.code, 0);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("spec_name,delta,f,alice_bound,bob_bound"));
    assert!(lines[1].starts_with("cks,"));
}

#[test]
fn analyze_input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = weakot(&["analyze", "missing.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    std::fs::write(dir.path().join("bad.json"), "{ not json").unwrap();
    assert_eq!(weakot(&["analyze", "bad.json"], dir.path()).status.code(), Some(2));
    std::fs::write(dir.path().join("extra.json"), r#"{"name": "x", "bogus": 1}"#).unwrap();
    assert_eq!(weakot(&["analyze", "extra.json"], dir.path()).status.code(), Some(2));
}

#[test]
fn analyze_invalid_spec_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let mut v: Value = serde_json::from_str(&build_cks().to_json()).unwrap();
    // Scale one entry of Bob's unitary so it is no longer unitary.
    v["rounds"][1]["matrix"][0][0] = serde_json::json!([2.0, 0.0]);
    std::fs::write(dir.path().join("broken.json"), v.to_string()).unwrap();
    assert_eq!(weakot(&["analyze", "broken.json"], dir.path()).status.code(), Some(3));

    // Bob ignores his inputs: a valid spec that is not complete.
    let mut v: Value = serde_json::from_str(&build_trivial().to_json()).unwrap();
    let n = v["rounds"][1]["matrix"].as_array().unwrap().len();
    let id: Vec<Vec<[f64; 2]>> =
        (0..n).map(|i| (0..n).map(|j| [if i == j { 1.0 } else { 0.0 }, 0.0]).collect()).collect();
    v["rounds"][1]["matrix"] = serde_json::to_value(id).unwrap();
    std::fs::write(dir.path().join("lazy.json"), v.to_string()).unwrap();
    assert_eq!(weakot(&["analyze", "lazy.json"], dir.path()).status.code(), Some(3));
}

#[test]
fn builtin_names_shadow_files() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cks"), build_trivial().to_json()).unwrap();
    let builtin = json(&weakot(&["analyze", "cks"], dir.path()));
    close(&builtin, "alice_bound", 0.5);
    let file = json(&weakot(&["analyze", "./cks"], dir.path()));
    close(&file, "alice_bound", 1.0);
}

#[test]
fn exported_protocol_analyzes_identically() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cks.json"), build_cks().to_json()).unwrap();
    let a = weakot(&["analyze", "cks"], dir.path());
    let b = weakot(&["analyze", "cks.json"], dir.path());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn curve_examples() {
    let out = run(["weakot", "curve", "--epsilon", "0", "--points", "3"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout.lines().next(), Some("lambda,epsilon,p_bob,p_alice,combined"));
    let rows = csv_rows(&out.stdout);
    assert_eq!(
        rows,
        vec![vec![0.0, 0.0, 0.75, 0.5, 2.0], vec![0.5, 0.0, 0.625, 0.75, 2.0], vec![1.0, 0.0, 0.5, 1.0, 2.0]]
    );
    let interior = csv_rows(&run(["weakot", "curve", "--epsilon", "0.04", "--points", "5"]).stdout);
    for r in &interior[1..4] {
        assert!((r[4] - 2.04).abs() < 1e-12);
    }
    // At the endpoints the forcing caps saturate at 1, which costs ε/2.
    let ends = csv_rows(&run(["weakot", "curve", "--epsilon", "0.04", "--points", "2"]).stdout);
    for r in &ends {
        assert!((r[4] - 2.02).abs() < 1e-12, "{r:?}");
    }
    assert_eq!(run(["weakot", "curve", "--points", "1"]).code, 2);
}

#[test]
fn curve_json_is_sorted() {
    let out = run(["weakot", "curve", "--points", "2", "--format", "json"]);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    let first = out.stdout.find("\"combined\"").unwrap();
    assert!(first < out.stdout.find("\"epsilon\"").unwrap());
    assert!(out.stdout.find("\"p_alice\"").unwrap() < out.stdout.find("\"p_bob\"").unwrap());
}

#[test]
fn robustness_rows() {
    let out = run(["weakot", "robustness", "--delta-min", "0", "--delta-max", "0.05", "--steps", "5"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout.lines().next(), Some("delta,p3,lambda_star,max_cheat"));
    let rows = csv_rows(&out.stdout);
    assert_eq!(rows.len(), 6);
    let r0 = &rows[0];
    assert!((r0[1] - 0.5).abs() < 1e-12 && (r0[2] - 1.0 / 3.0).abs() < 1e-9 && (r0[3] - 2.0 / 3.0).abs() < 1e-9);
    let r1 = &rows[1];
    assert!((r1[0] - 0.01).abs() < 1e-12);
    assert!((r1[1] - 0.6095).abs() < 1e-4 && (r1[2] - 0.2194).abs() < 1e-4 && (r1[3] - 0.6952).abs() < 1e-4);
    let last = &rows[5];
    assert_eq!((last[2], last[3]), (0.0, 0.75));
}

#[test]
fn robustness_with_oracle_column() {
    let out = run(["weakot", "robustness", "--delta-min", "0", "--delta-max", "0", "--steps", "0", "--oracle-grid", "50"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout.lines().next(), Some("delta,p3,lambda_star,max_cheat,oracle_p3"));
    let rows = csv_rows(&out.stdout);
    assert!((rows[0][4] - 0.5).abs() < 0.04);
}

#[test]
fn robustness_range_errors() {
    for args in [
        ["--delta-min", "0.3", "--delta-max", "0.2", "--steps", "2"],
        ["--delta-min", "-0.1", "--delta-max", "0.2", "--steps", "2"],
        ["--delta-min", "0", "--delta-max", "0.6", "--steps", "2"],
    ] {
        let mut full = vec!["weakot", "robustness"];
        full.extend(args);
        assert_eq!(run(full).code, 2, "{args:?}");
    }
    assert_eq!(
        run(["weakot", "robustness", "--delta-min", "0", "--delta-max", "0.1", "--steps", "1", "--oracle-grid", "10"]).code,
        2
    );
}

#[test]
fn simulate_is_seeded() {
    let a = run(["weakot", "simulate", "--lambda", "0.25", "--trials", "2000", "--seed", "5"]);
    let b = run(["weakot", "simulate", "--lambda", "0.25", "--trials", "2000", "--seed", "5"]);
    assert_eq!(a.code, 0);
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a.stdout).unwrap();
    assert_eq!(v["trials"], 2000);
    assert_eq!(v["correct"], 2000);
    assert_eq!(run(["weakot", "simulate", "--lambda", "1.5", "--trials", "10"]).code, 2);
    assert_eq!(run(["weakot", "simulate", "--lambda", "0.5", "--trials", "0"]).code, 2);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let out = run(["weakot", "curve", "--points", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.is_empty());
    let direct = run(["weakot", "curve", "--points", "3"]);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), direct.stdout);
}

#[test]
fn usage_errors() {
    assert_eq!(run(["weakot"]).code, 2);
    assert_eq!(run(["weakot", "launch"]).code, 2);
    assert_eq!(run(["weakot", "curve", "--points", "3", "--colour", "red"]).code, 2);
    assert_eq!(run(["weakot", "curve", "--points", "three"]).code, 2);
    assert_eq!(run(["weakot", "--help"]).code, 0);
}

#[test]
fn verify_default_seed_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = weakot(&["verify"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS qcore.fuchs_van_de_graaf"));
    assert!(!text.contains("FAIL"));
}

fn squared_fidelity(a: &DensityOp, b: &DensityOp) -> weakot::Result<f64> {
    Ok(fidelity(a, b)?.powi(2))
}

#[test]
fn verify_flags_squared_fidelity() {
    let rep = run_all_with(0, &Primitives { fidelity: squared_fidelity });
    let (text, code) = render_verify(&rep, None).unwrap();
    assert_eq!(code, 1);
    assert!(text.contains("FAIL qcore.fuchs_van_de_graaf"), "{text}");
    assert!(rep.failing().contains(&"qcore.fuchs_van_de_graaf"));
}
