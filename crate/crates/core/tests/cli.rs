//! End-to-end runs of the `ncrational` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ncr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncrational")).args(args).output().expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = ncr(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn factor_reports_plastic_constant() {
    let v = ok_json(&["factor", "1 + z1 + z1*z2"]);
    let q2 = v["constant_term_squared"].as_f64().unwrap();
    assert!((q2 - 1.754877666247).abs() < 1e-9, "{q2}");
}

#[test]
fn scan_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for run in 0..2 {
        let csv = dir.path().join(format!("scan{run}.csv"));
        let pgm = dir.path().join(format!("scan{run}.pgm"));
        let stdout = ncr(&["spectrum-scan", "z1 + 0.5*z2", "--res", "0.1", "--csv", p(&csv), "--pgm", p(&pgm), "--jobs", "2"]);
        assert!(stdout.status.success());
        files.push((stdout.stdout, std::fs::read(&csv).unwrap(), std::fs::read(&pgm).unwrap()));
    }
    assert_eq!(files[0], files[1]);
    let csv = String::from_utf8(files[0].1.clone()).unwrap();
    assert_eq!(csv.lines().next(), Some("re,im,member,class"));
    assert!(files[0].2.starts_with(b"P5\n"));
}

#[test]
fn sampling_is_seeded() {
    let a = ncr(&["spectrum-sample", "z1*z2 + z2", "--levels", "3", "--samples", "20", "--seed", "7"]);
    let b = ncr(&["spectrum-sample", "z1*z2 + z2", "--levels", "3", "--samples", "20", "--seed", "7", "--jobs", "1"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 20 * (1 + 2 + 3));
}

#[test]
fn realization_file_reproduces_analyses() {
    let dir = tempfile::tempdir().unwrap();
    let expr = "inv(1 - 0.5*z1*z2) + z2";
    let out = ncr(&["realize", expr]);
    assert!(out.status.success());
    let file = dir.path().join("r.json");
    std::fs::write(&file, &out.stdout).unwrap();
    for cmd in ["spr", "norm", "member", "outer-test", "boundary-sing"] {
        let direct = ncr(&[cmd, expr]);
        let loaded = ncr(&[cmd, "--realization", p(&file)]);
        assert!(direct.status.success(), "{cmd}");
        assert_eq!(direct.stdout, loaded.stdout, "{cmd}");
    }
}

#[test]
fn spr_of_known_tuple() {
    let v = ok_json(&["spr", "inv(1 - 0.5*z1*z2)", "--method", "iterate"]);
    // one cycle of length 2 and weight 1/2
    let rho = v["spr"].as_f64().unwrap();
    assert!((rho - 0.5f64.sqrt()).abs() < 1e-9, "{rho}");
}

#[test]
fn leading_minus_needs_separator() {
    let v = ok_json(&["parse", "--", "-z1 + 2"]);
    assert_eq!(v["d"], 1);
}

#[test]
fn numerical_errors_exit_one_with_json() {
    let out = ncr(&["factor", "inv(1 - z1)"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["error"]["code"].is_string() || v["error"]["code"].is_number());
}

#[test]
fn syntax_errors_exit_one() {
    let out = ncr(&["parse", "z1 + * z2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(ncr(&["spr", "z1", "--bogus"]).status.code(), Some(2));
    assert_eq!(ncr(&["no-such-command"]).status.code(), Some(2));
}
