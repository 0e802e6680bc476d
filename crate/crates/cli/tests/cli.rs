use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn shintani(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shintani"))
        .args(args)
        .env("SHINTANI_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn emitted_field_file_loads_back() {
    let dir = tempfile::tempdir().unwrap();
    let emitted = shintani(&["field", "--instance", "sqrt5-n11", "--emit"]);
    assert!(emitted.status.success());
    let path = write(dir.path(), "f.field", std::str::from_utf8(&emitted.stdout).unwrap());
    let from_file = json(&shintani(&["field", "--field", &path]));
    let shipped = json(&shintani(&["field", "--instance", "sqrt5-n11"]));
    assert_eq!(from_file, shipped);
    assert_eq!(shipped["rho"], serde_json::json!([1, 9]));
    assert_eq!(shipped["basis"][1]["trace"], "3");
}

#[test]
fn corrupted_residue_map_is_rejected_at_load() {
    let dir = tempfile::tempdir().unwrap();
    let emitted = shintani(&["field", "--instance", "sqrt5-n5", "--emit"]);
    let text = String::from_utf8(emitted.stdout).unwrap().replace("rho = 1 4", "rho = 1 2");
    let path = write(dir.path(), "bad.field", &text);
    let out = shintani(&["field", "--field", &path]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 11") && err.contains("(eps, eps)"), "{err}");
}

#[test]
fn flagship_truncations() {
    let out = shintani(&["lvalue", "--instance", "sqrt5-n5", "--levels", "1"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["closed_form"]["coeffs"][0], "4/5");
    let rows = v["truncations"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1]["exact"]["coeffs"][0], "2258");
    assert_eq!(rows[1]["distance_to_previous"], 0);
    assert!(rows[1]["runtime_ms"].is_u64());
}

#[test]
fn period_matches_oracle() {
    let out = shintani(&["period", "--instance", "sqrt5-n5", "--level", "1", "--l", "1 2", "--oracle"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["agrees"], true);
    assert_eq!(v["value"]["coeffs"][0], "-2/5");
}

#[test]
fn gamma_and_identity_commands() {
    let g = json(&shintani(&["gamma", "--instance", "rational-n5", "--p", "5", "--y", "1/3", "--precision", "4"]));
    assert_eq!(g["value"]["valuation"], 0);
    assert_eq!(g["log"]["precision"], 4);
    let c = json(&shintani(&["identity", "curious", "--max-n", "11"]));
    assert_eq!(c["pass"], true);
    assert_eq!(c["moduli"][0]["n"], 5);
    assert_eq!(c["moduli"][0]["values"][0], "4");
    assert_eq!(shintani(&["identity", "nonsense"]).status.code(), Some(2));
}

#[test]
fn fg_suite_without_manifest() {
    let out = shintani(&["verify", "--suite", "fg", "--max-q", "1024"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["failed"], 0);
    assert_eq!(v["checks"][0]["name"], "ferrero-greenberg-grid");
    assert!(v["checks"][0]["detail"]["cases"].as_u64().unwrap() > 1000);
}

#[test]
fn verify_reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = "seed = 3\nsuites = periods identities lvalue\n\n[instance]\nsource = sqrt5-n5\nlevels = 1\nsamples = 8\n";
    let path = write(dir.path(), "m.manifest", manifest);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let o = shintani(&["verify", "--manifest", &path, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let strip = |p: &Path| {
        let text = std::fs::read_to_string(p).unwrap();
        text[..text.find("\"timings\"").unwrap()].to_string()
    };
    assert_eq!(strip(&a), strip(&b));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&a).unwrap()).unwrap();
    assert_eq!(v["failed"], 0);
    let suites: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["suite"].as_str().unwrap()).collect();
    let mut sorted = suites.clone();
    sorted.sort();
    assert_eq!(suites, sorted);
}

#[test]
fn failing_checks_are_enumerated_and_set_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = "suites = lvalue\n[instance]\nsource = sqrt5-n5\ncharacter = 7\nlevels = 1\n[instance]\nsource = sqrt5-n5\nlevels = 1\n";
    let path = write(dir.path(), "m.manifest", manifest);
    let out = shintani(&["verify", "--manifest", &path]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["failed"], 1);
    assert!(v["passed"].as_u64().unwrap() >= 2);
}

#[test]
fn manifest_errors_name_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "m.manifest", "seed = 1\n[instance]\nsource = sqrt5-n5\np = three\n");
    let out = shintani(&["verify", "--manifest", &path]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4, column 5"), "{err}");
}
