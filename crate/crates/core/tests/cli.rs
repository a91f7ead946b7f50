use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const CUBE: &str = r#"{"generators": [[1,0,0],[0,1,0],[0,0,1]]}"#;
const FLAT: &str = r#"{"generators": [[1,0,0],[0,1,0],[1,1,0]]}"#;
const ALL_BETAS: &str = r#"{"tetrahedron": [[1,1,1],[1,-1,-1],[-1,1,-1],[-1,-1,1]], "betas": [1,1,1,1,1,1]}"#;
const DISJOINT: &str = r#"{"tetrahedron": [[1,1,1],[1,-1,-1],[-1,1,-1],[-1,-1,1]], "betas": [0,1,1,1,1,0]}"#;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parallelohedra")).args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn measure_cube() {
    let dir = TempDir::new().unwrap();
    let o = bin(&["measure", &write(&dir, "cube.json", CUBE)]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["volume"], 1.0);
    assert_eq!(v["surface_area"], 6.0);
    assert_eq!(v["mean_width"], 1.5);
    assert_eq!(v["inradius"], 0.5);
    assert_eq!(v["cross_check"]["hull_volume_delta"], 0.0);
}

#[test]
fn measure_unit_truncated_octahedron() {
    let dir = TempDir::new().unwrap();
    let b = 16f64.powf(-1.0 / 3.0);
    let body = format!(r#"{{"tetrahedron": [[1,1,1],[1,-1,-1],[-1,1,-1],[-1,-1,1]], "betas": [{b},{b},{b},{b},{b},{b}]}}"#);
    let o = bin(&["measure", &write(&dir, "to.json", &body)]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!((v["volume"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["mean_width"].as_f64().unwrap() - 3.0 / 2f64.powf(7.0 / 6.0)).abs() < 1e-12);
    assert_eq!(v["provenance"], "beta_representation");
    assert!(v["cross_check"]["generic_volume_delta"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn measure_planar_is_a_numerical_failure() {
    let dir = TempDir::new().unwrap();
    let o = bin(&["measure", &write(&dir, "flat.json", FLAT)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("not full-dimensional"));
}

#[test]
fn classify_outputs() {
    let dir = TempDir::new().unwrap();
    let o = bin(&["classify", &write(&dir, "all.json", ALL_BETAS), "--belts", "--json-indent", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), r#"{"type":5,"zeros":[],"belts":{"four":0,"six":6}}"#);
    let o = bin(&["classify", &write(&dir, "disjoint.json", DISJOINT)]);
    assert_eq!(json(&o)["type"], 3);
    let o = bin(&["classify", &write(&dir, "bad.json", "{not json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    let o = bin(&["classify", &write(&dir, "cube.json", CUBE)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_suites_pass_and_failures_leave_a_replay() {
    for suite in ["identities", "lemma-max", "isotropy", "bound-chain", "cross-id", "representation"] {
        let o = bin(&["verify", "--suite", suite, "--trials", "50", "--seed", "4"]);
        assert_eq!(o.status.code(), Some(0), "{suite}: {}", String::from_utf8_lossy(&o.stdout));
        assert_eq!(json(&o)["passed"], true);
    }
    let dir = TempDir::new().unwrap();
    let replay = dir.path().join("replay.json");
    let o = bin(&["verify", "--suite", "identities", "--trials", "5", "--tol", "1e-300", "--replay", replay.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["passed"], false);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&replay).unwrap()).unwrap();
    assert_eq!(doc["suite"], "identities");
    assert_eq!(doc["points"], Value::Null);
    assert!(doc["sample"]["points"].is_array());
    assert_eq!(bin(&["verify", "--suite", "nonsense"]).status.code(), Some(1));
    assert_eq!(bin(&["verify", "--suite", "identities", "--tol=-1"]).status.code(), Some(1));
}

#[test]
fn verify_is_reproducible() {
    let a = bin(&["verify", "--suite", "isotropy", "--trials", "30", "--seed", "8"]);
    let b = bin(&["verify", "--suite", "isotropy", "--trials", "30", "--seed", "8"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn optimize_outputs() {
    let o = bin(&["optimize", "--type", "1", "--starts", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!((v["best_width"].as_f64().unwrap() - 1.5).abs() < 1e-6);
    assert_eq!(v["history"].as_array().unwrap().len(), 4);
    let o = bin(&["optimize", "--type", "5", "--starts", "4", "--fastpath"]);
    assert_eq!(json(&o)["method"], "isotropic");
    assert_eq!(bin(&["optimize", "--type", "2", "--fastpath"]).status.code(), Some(1));
    assert_eq!(bin(&["optimize", "--type", "6"]).status.code(), Some(1));
}

#[test]
fn table1_is_byte_identical_across_runs() {
    let a = bin(&["table1", "--starts", "3", "--seed", "2"]);
    let b = bin(&["table1", "--starts", "3", "--seed", "2"]);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[3]["optimum_known"], false);
}

fn off_counts(text: &str) -> (usize, usize) {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("OFF"));
    let counts: Vec<usize> = lines.next().unwrap().split_whitespace().map(|s| s.parse().unwrap()).collect();
    (counts[0], counts[1])
}

#[test]
fn export_meshes_and_json() {
    let dir = TempDir::new().unwrap();
    let o = bin(&["export", &write(&dir, "all.json", ALL_BETAS), "--format", "off"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(off_counts(&String::from_utf8_lossy(&o.stdout)), (24, 14));

    let out = dir.path().join("cube.off");
    let o = bin(&["export", &write(&dir, "cube.json", CUBE), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(off_counts(&std::fs::read_to_string(&out).unwrap()), (8, 6));

    let o = bin(&["export", &write(&dir, "flat.json", FLAT)]);
    assert_eq!(o.status.code(), Some(3));

    let o = bin(&["export", &dir.path().join("cube.json").to_string_lossy(), "--format", "json"]);
    let v = json(&o);
    assert_eq!(v["measures"]["volume"], 1.0);
    assert_eq!(v["body"]["generators"].as_array().unwrap().len(), 3);
    assert!(!Path::new("replay-identities-0.json").exists());
}

#[test]
fn help_and_usage_errors() {
    let o = bin(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("table1"));
    assert_eq!(bin(&[]).status.code(), Some(0));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(bin(&["measure", "/nonexistent/body.json"]).status.code(), Some(1));
}
