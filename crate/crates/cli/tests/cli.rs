use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn expander(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_expander"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write_config(dir: &Path, design: &str, trials: u64) -> String {
    let path = dir.join("cfg.json");
    std::fs::write(
        &path,
        format!(
            r#"{{"design": {design}, "target": {{"kind": "exact-sparse", "s": 1}},
                "noise": {{"sigma": 0.5}}, "lambda_multiple": 6, "trials": {trials}, "seed": 2}}"#
        ),
    )
    .unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn construct_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    let gs = g.to_str().unwrap();
    let out = expander(&[
        "construct",
        "pv",
        "--q",
        "8",
        "--l",
        "2",
        "--m",
        "2",
        "--h",
        "3",
        "--out",
        gs,
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let graph = read_json(&g);
    assert_eq!(graph["p"], 64);
    assert_eq!(graph["n"], 512);
    let manifest = read_json(&dir.path().join("g.json.manifest.json"));
    assert_eq!(manifest["command"], "construct pv");

    let ok = expander(&["verify", "--graph", gs, "--s", "4", "--eps", "0.125"]);
    assert_eq!(code(&ok), 0);
    let report: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(report["ok"], true);

    let bad = expander(&["verify", "--graph", gs, "--s", "4", "--eps", "0.01"]);
    assert_eq!(code(&bad), 1);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"random": {"p": 30, "d": 3, "n": 20, "seed": 1}}"#, 5);
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = expander(&["bench", "lasso", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert!(code(&o) <= 1, "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn lasso_csv_has_header_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"random": {"p": 30, "d": 3, "n": 20, "seed": 1}}"#, 3);
    let out = dir.path().join("r.csv");
    let o = expander(&[
        "bench",
        "lasso",
        "--config",
        &cfg,
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(code(&o) <= 1);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().next().unwrap().starts_with("experiment,trial,"));
    assert!(text.lines().count() > 1);
    let manifest = read_json(&dir.path().join("r.csv.manifest.json"));
    assert_eq!(manifest["command"], "bench lasso");
    assert!(manifest["parameters"].is_object());
}

#[test]
fn recovery_refuses_uncertified_design() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"random": {"p": 40, "d": 2, "n": 10, "seed": 0}}"#, 3);
    let o = expander(&["bench", "recovery", "--config", &cfg]);
    assert_eq!(code(&o), 1);
    assert!(!o.stderr.is_empty());
}

#[test]
fn noise_check_reports_bound() {
    let o = expander(&["noise-check", "--n", "50", "--trials", "400", "--model", "ar1:0.3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in ["frequency", "bound", "pass", "trials", "threshold"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    assert_eq!(report["trials"], 400);
}

#[test]
fn factors_match_closed_form() {
    let o = expander(&["bench", "factors", "--s", "4", "--p", "256", "--theta", "1"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let rho = v["rho"].as_f64().unwrap();
    assert!((rho / 1.527e5 - 1.0).abs() < 1e-3);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&expander(&["construct", "pv", "--q", "3", "--bogus"])), 2);
    assert_eq!(code(&expander(&["frobnicate"])), 2);
    assert_eq!(
        code(&expander(&["verify", "--graph", "/nonexistent/g.json", "--s", "2"])),
        2
    );
    assert_eq!(code(&expander(&["noise-check", "--n", "10", "--model", "ar2"])), 2);
}
