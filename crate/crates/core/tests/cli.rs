use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const EIG_MIN: &str = r#"{
    "grid": {"dim": 1, "bounds": [[0, 1]], "cells_per_axis": [8]},
    "kernel": {"family": "pure_fractional", "p": 2, "s": 0.4},
    "weight": {"generator": "binary", "fraction": 0.5},
    "solver": {"restarts": 3, "seed": 5}
}"#;

const ENERGY: &str = r#"{
    "grid": {"dim": 1, "bounds": [[0, 1]], "cells_per_axis": [8]},
    "kernel": {"family": "pure_fractional", "p": 2, "s": 0.4},
    "weight": {"generator": "binary", "fraction": 0.5},
    "solver": {"restarts": 2, "seed": 1}
}"#;

fn fraclap(args: &[&str], config: Option<&str>, out: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fraclap"));
    cmd.args(args).arg("--out").arg(out);
    if let Some(text) = config {
        let path = out.with_extension("json");
        fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.output().unwrap()
}

fn summary(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn eig_min_matches_enumeration() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = fraclap(&["eig-min", "--validate"], Some(EIG_MIN), &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&out);
    assert_eq!(s["status"], "ok");
    assert_eq!(s["matches_bruteforce"], true);
    assert_eq!(s["bruteforce_members"], 70);
    for f in ["trace.csv", "field_u.csv", "field_g.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let g = fs::read_to_string(out.join("field_g.csv")).unwrap();
    assert_eq!(g.lines().next(), Some("cell,x,value"));
    assert_eq!(g.lines().count(), 9);
}

#[test]
fn energy_max_and_dirichlet_solve() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("energy");
    let o = fraclap(&["energy-max", "--validate"], Some(ENERGY), &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(summary(&out)["matches_bruteforce"], true);

    let out = dir.path().join("dirichlet");
    let o = fraclap(&["dirichlet-solve", "--validate"], Some(ENERGY), &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&out);
    assert!(s["phi"].as_f64().unwrap() > 0.0);
    assert_eq!(s["matches_oracle"], true);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let oa = fraclap(&["eig-min"], Some(EIG_MIN), &a);
    let ob = fraclap(&["eig-min"], Some(EIG_MIN), &b);
    assert!(oa.status.success() && ob.status.success());
    assert_eq!(oa.stdout, ob.stdout);
    for f in ["trace.csv", "field_u.csv", "field_g.csv", "summary.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn config_errors_list_every_violation() {
    let dir = tempfile::tempdir().unwrap();
    let bad = r#"{
        "grid": {"dim": 1, "bounds": [[0, 1]], "cells_per_axis": [0]},
        "kernel": {"family": "pure_fractional", "p": 0.5, "s": 1.5},
        "weight": {"generator": "binary", "fraction": 0.5},
        "solver": {"restarts": 2}
    }"#;
    let o = fraclap(&["eig-min"], Some(bad), &dir.path().join("bad"));
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "config");
    let text = err.to_string();
    assert_eq!(err["error"]["violations"].as_array().unwrap().len(), 3);
    for needle in ["2 cells", "p must", "s must", "seed"] {
        assert!(text.contains(needle), "missing {needle:?} in {text}");
    }
}

#[test]
fn malformed_json_and_missing_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = fraclap(&["eigen-solve"], Some("{ not json"), &dir.path().join("x"));
    assert_eq!(o.status.code(), Some(2));
    let o = fraclap(&["eigen-solve"], None, &dir.path().join("y"));
    assert_eq!(o.status.code(), Some(2));
    let unknown = EIG_MIN.replace("\"solver\"", "\"solvr\"");
    let o = fraclap(&["eig-min"], Some(&unknown), &dir.path().join("z"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn validate_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v");
    let o = fraclap(&["validate", "--seed", "3"], None, &out);
    assert!(o.status.success());
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.lines().count() >= 9);
    assert!(stdout.lines().all(|l| l.starts_with("PASS ")), "{stdout}");
    let report: Value = serde_json::from_str(&fs::read_to_string(out.join("validate.json")).unwrap()).unwrap();
    assert_eq!(report["seed"], 3);
}
