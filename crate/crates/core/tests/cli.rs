//! Exit codes and output of the `modelopt` binary.

use std::path::Path;
use std::process::{Command, Output};

fn modelopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modelopt")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn plan_prints_counts() {
    let o = modelopt(&["plan", "--eps", "0.01", "--L", "1", "--R", "1", "--sigma", "1", "--p", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("N=10 r=1000 calls=10000"), "{}", stdout(&o));
}

#[test]
fn plan_rejects_bad_order() {
    let o = modelopt(&["plan", "--eps", "0.01", "--L", "1", "--R", "1", "--sigma", "1", "--p", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_config_exits_2() {
    let o = modelopt(&["run", "/nonexistent/config.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "seeds = [1]\n[problem]\nfamily = \"cubic\"\n").unwrap();
    let o = modelopt(&["run", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
}

#[test]
fn run_then_rates() {
    let dir = tempfile::tempdir().unwrap();
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/quadratic_fgm.toml");
    let text = std::fs::read_to_string(src).unwrap().replace("out/quadratic_fgm", "out");
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(&cfg, text).unwrap();
    let o = modelopt(&["run", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches("bound PASS").count(), 3);
    let trace = dir.path().join("out/trace.csv");
    let o = modelopt(&["rates", trace.to_str().unwrap(), "--window", "20", "300"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("median"));
}

#[test]
fn verify_composite_suite_passes() {
    let o = modelopt(&["verify", "--suite", "composite"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS [12]"));
}

#[test]
fn verify_unknown_suite_exits_2() {
    let o = modelopt(&["verify", "--suite", "everything"]);
    assert_eq!(o.status.code(), Some(2));
}
