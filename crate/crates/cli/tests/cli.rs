//! End-to-end tests of the binary: exit codes, JSON round trips and the
//! body/eval pipeline against the known simplex values.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lpproj"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("lpproj-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn gen_body_eval_pipeline() {
    let t3 = tmp("t3.json");
    let body = tmp("t3-body.json");
    let o = run(&["gen", "--shape", "simplex", "--n", "3", "--out", t3.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));

    let o = run(&[
        "body", "--op", "pi-plus", "--p", "2",
        "--in", t3.to_str().unwrap(), "--out", body.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&body).unwrap()).unwrap();
    assert_eq!(parsed["pos"]["terms"].as_array().unwrap().len(), 1);

    let o = run(&["eval", "--in", body.to_str().unwrap(), "--dir", "1,0,0"]);
    assert_eq!(o.status.code(), Some(0));
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 0.5).abs() < 1e-14);

    let o = run(&["eval", "--in", body.to_str().unwrap(), "--dir", "-1,0,0"]);
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert_eq!(v, 0.0);

    let o = run(&["eval", "--in", body.to_str().unwrap(), "--dir", "0,0,0"]);
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert_eq!(v, 0.0);

    // pi-plus-neg vanishes on polytopes containing the origin.
    let o = run(&["body", "--op", "pi-plus-neg", "--p", "2", "--in", t3.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(parsed["pos"]["terms"].as_array().unwrap().is_empty());

    std::fs::remove_file(&t3).ok();
    std::fs::remove_file(&body).ok();
}

#[test]
fn exit_codes() {
    // Malformed JSON: exit 2.
    let bad = tmp("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let o = run(&["body", "--op", "pi-plus", "--p", "2", "--in", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_file(&bad).ok();

    // Precondition violation: pi-plus on a polytope missing the origin.
    let sh = tmp("shifted.json");
    let o = run(&["gen", "--shape", "shifted-simplex", "--n", "3", "--out", sh.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["body", "--op", "pi-plus", "--p", "2", "--in", sh.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("origin"));
    std::fs::remove_file(&sh).ok();

    // Unknown suite and unknown operator: exit 2.
    let o = run(&["verify", "--suite", "nope", "--n", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["verify", "--suite", "classification", "--n", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n >= 3"));

    // Missing required flag: clap usage error, exit 2.
    let o = run(&["gen"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_suite_passes_and_corrupted_fails() {
    let o = run(&[
        "verify", "--suite", "homogeneity", "--n", "3", "--p", "2", "--cases", "4", "--seed", "7",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let first = stdout(&o).lines().next().unwrap().to_string();
    let report: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(report["passed"], serde_json::Value::Bool(true));

    let o = run(&[
        "verify", "--suite", "valuation", "--n", "3", "--p", "2", "--cases", "8", "--seed", "7",
        "--corrupted",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn gen_is_deterministic() {
    let a = run(&["gen", "--shape", "random", "--n", "3", "--seed", "42"]);
    let b = run(&["gen", "--shape", "random", "--n", "3", "--seed", "42"]);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["gen", "--shape", "random", "--n", "3", "--seed", "43"]);
    assert_ne!(a.stdout, c.stdout);

    // LPPROJ_SEED provides the default seed.
    let d = bin()
        .args(["gen", "--shape", "random", "--n", "3"])
        .env("LPPROJ_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(a.stdout, d.stdout);

    // random-o polytopes contain the origin.
    let o = run(&["gen", "--shape", "random-o", "--n", "3", "--seed", "1"]);
    let poly =
        lpproj_core::Polytope::from_json(&serde_json::from_slice(&o.stdout).unwrap()).unwrap();
    assert!(poly.contains_origin());
}
