use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn minkpoly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minkpoly")).args(args).env_remove("MINKPOLY_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn sample_to(dir: &Path, n: usize) -> String {
    let path = dir.join(format!("p{n}.json"));
    let o = minkpoly(&["sample", "--n", &n.to_string(), "--seed", "5", "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    path.to_str().unwrap().to_owned()
}

#[test]
fn sample_is_seeded_and_env_overrides() {
    let a = minkpoly(&["sample", "--n", "5", "--seed", "42"]);
    let b = minkpoly(&["sample", "--n", "5", "--seed", "42"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let doc: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["n"], 5);
    assert_eq!(doc["edges"].as_array().unwrap().len(), 5);

    let env = Command::new(env!("CARGO_BIN_EXE_minkpoly"))
        .args(["sample", "--n", "5", "--seed", "1"])
        .env("MINKPOLY_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(env.stdout, a.stdout);

    let bad = Command::new(env!("CARGO_BIN_EXE_minkpoly"))
        .args(["sample", "--n", "5"])
        .env("MINKPOLY_SEED", "nope")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn sample_rejects_impossible_and_bad_masses() {
    assert_eq!(minkpoly(&["sample", "--n", "3"]).status.code(), Some(2));
    assert_eq!(minkpoly(&["sample", "--n", "4", "--mass", "-1"]).status.code(), Some(2));
    assert_eq!(minkpoly(&["sample", "--n", "4", "--mass", "1", "--mass", "2"]).status.code(), Some(2));
    let ok = minkpoly(&["sample", "--n", "3", "--mass", "1", "--mass", "1", "--mass", "10"]);
    assert!(ok.status.success(), "two unit edges can balance a heavy third");
    let mixed = minkpoly(&["sample", "--n", "4", "--mass", "1", "--mass", "2", "--mass", "1", "--mass", "2"]);
    assert!(mixed.status.success());
}

#[test]
fn verify_writes_report_and_sets_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = minkpoly(&["verify", "--n", "4", "--trials", "3", "--suite", "bracket,complex", "--report", report.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS complex.square"));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["verdict"], "pass");
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));

    let strict = minkpoly(&["verify", "--n", "4", "--trials", "2", "--suite", "sampler", "--tol.sampler.closure=0"]);
    assert_eq!(strict.status.code(), Some(1));
    let spaced = minkpoly(&["verify", "--n", "4", "--trials", "2", "--suite", "sampler", "--tol.sampler.closure", "0"]);
    assert_eq!(spaced.status.code(), Some(1));

    assert_eq!(minkpoly(&["verify", "--tol.nope=1"]).status.code(), Some(2));
    assert_eq!(minkpoly(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(minkpoly(&["verify", "--h", "0"]).status.code(), Some(2));
}

#[test]
fn verify_on_a_fixed_polygon() {
    let dir = tempfile::tempdir().unwrap();
    let p = sample_to(dir.path(), 5);
    let o = minkpoly(&["verify", "--in", &p, "--trials", "2", "--suite", "omega,projection", "--h", "1e-2,1e-3"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("verdict: pass"));
}

#[test]
fn inspect_reports_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let p = sample_to(dir.path(), 6);
    let o = minkpoly(&["inspect", "--in", &p]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("n: 6"));
    assert!(text.contains("calibrated slice dimension: 6"));
    assert!(text.contains("collinear: false"));
}

#[test]
fn nijenhuis_sweep_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let p = sample_to(dir.path(), 5);
    let plot = dir.path().join("n.svg");
    let o = minkpoly(&["nijenhuis", "--in", &p, "--trials", "3", "--h", "1e-2,1e-3", "--plot", plot.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("fitted order"));
    assert!(std::fs::read_to_string(plot).unwrap().starts_with("<svg"));
}

#[test]
fn project_and_calibrate_documents() {
    let dir = tempfile::tempdir().unwrap();
    let p = sample_to(dir.path(), 4);
    let x = json!({
        "base": "p4.json",
        "components": [[0.1, 0.2, 0.3], [-0.4, 0.5, 0.1], [0.0, -0.3, 0.2], [0.7, 0.1, -0.5]],
    });
    let xin = dir.path().join("x.json");
    std::fs::write(&xin, x.to_string()).unwrap();

    let tangent = dir.path().join("t.json");
    let o = minkpoly(&["project", "--in", xin.to_str().unwrap(), "--out", tangent.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t: Value = serde_json::from_str(&std::fs::read_to_string(&tangent).unwrap()).unwrap();
    assert_eq!(t["gauge_state"], "calibrated");

    let normal = minkpoly(&["project", "--in", xin.to_str().unwrap(), "--normal"]);
    assert!(normal.status.success());
    let nv: Value = serde_json::from_slice(&normal.stdout).unwrap();
    for i in 0..4 {
        for k in 0..3 {
            let sum = t["components"][i][k].as_f64().unwrap() + nv["components"][i][k].as_f64().unwrap();
            assert!((sum - x["components"][i][k].as_f64().unwrap()).abs() < 1e-12);
        }
    }

    let o = minkpoly(&["calibrate", "--in", tangent.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let again: Value = serde_json::from_slice(&o.stdout).unwrap();
    for i in 0..4 {
        for k in 0..3 {
            let d = again["components"][i][k].as_f64().unwrap() - t["components"][i][k].as_f64().unwrap();
            assert!(d.abs() < 1e-10);
        }
    }

    assert_eq!(minkpoly(&["calibrate", "--in", &p]).status.code(), Some(2));
    assert_eq!(minkpoly(&["project", "--in", "/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn usage_errors() {
    assert_eq!(minkpoly(&["bogus"]).status.code(), Some(2));
    assert_eq!(minkpoly(&["sample"]).status.code(), Some(2));
    assert_eq!(minkpoly(&["sample", "--n", "4", "--tol.sampler.closure=1"]).status.code(), Some(2));
}
