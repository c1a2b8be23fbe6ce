//! The binary end to end: exit codes, output files and determinism.

use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conformal-eds"))
        .arg("--outdir")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("config.json");
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn verify_passes_and_reports_identically() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(code(&run(a.path(), &["verify"])), 0);
    assert_eq!(code(&run(b.path(), &["verify"])), 0);
    let read = |d: &Path| std::fs::read(d.join("report.json")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn a_mutated_entry_is_a_named_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["verify", "--mutate-entry", "0,1"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stdout).contains("w01"));
}

#[test]
fn involution_of_each_system_passes() {
    let dir = tempfile::tempdir().unwrap();
    for system in ["I1", "I2", "I3"] {
        assert_eq!(code(&run(dir.path(), &["involution", "--system", system])), 0, "{system}");
    }
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(dir.path(), &["involution", "--system", "I9"])), 4);
    assert_eq!(code(&run(dir.path(), &["frobnicate"])), 4);
    assert_eq!(code(&run(dir.path(), &["--help"])), 0);
}

#[test]
fn bad_configs_exit_with_the_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_config(dir.path(), r#"{"grid": {"nx": 17, "ny": 17}, "lambdsa": [1]}"#);
    let out = run(dir.path(), &["calapso", "--config", &unknown]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambdsa"));

    let broken = write_config(dir.path(), "{ not json");
    assert_eq!(code(&run(dir.path(), &["deform", "--config", &broken])), 4);

    let missing = dir.path().join("absent.json");
    assert_eq!(code(&run(dir.path(), &["calapso", "--config", missing.to_str().unwrap()])), 4);
}

#[test]
fn calapso_writes_its_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"grid": {"nx": 33, "ny": 33}, "lambdas": [0, 0.5]}"#);
    let out = run(dir.path(), &["calapso", "--config", &cfg]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    for f in ["report.json", "fields.csv", "surface_lambda_0.obj", "surface_lambda_0.5.obj", "surface_lambda_0.5.csv"] {
        assert!(dir.path().join(f).is_file(), "{f} missing");
    }
}
