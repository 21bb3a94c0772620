//! The command-line front end.

use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_safe-ik");

fn configs(name: &str) -> String {
    format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

#[test]
fn rollout_prints_csv() {
    let out = run(&["rollout", "--config", &configs("custom.toml"), "--solver", "B", "--seed", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let header = stdout.lines().next().unwrap();
    assert!(header.starts_with("tick,t,"), "{header}");
    assert!(stdout.lines().count() > 100);
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed 1 B"));
}

#[test]
fn rollout_is_reproducible_through_the_cli() {
    let args = ["rollout", "--config", &configs("custom.toml"), "--solver", "N", "--seed", "3"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn compare_writes_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("cmp");
    let out = run(&[
        "compare",
        "--config",
        &configs("custom.toml"),
        "--seeds",
        "2",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for file in ["summary.csv", "table.csv", "post_B_seed0.csv", "post_N_seed1.csv", "post_P_seed1.csv"] {
        assert!(out_dir.join(file).is_file(), "{file} missing");
    }
    let summary = std::fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 3 * 2);
}

#[test]
fn bad_arguments_fail() {
    let bad_solver = run(&["rollout", "--config", &configs("custom.toml"), "--solver", "Q"]);
    assert_eq!(bad_solver.status.code(), Some(2));
    let missing = run(&["rollout", "--config", "/nonexistent/run.toml", "--solver", "N"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).starts_with("error:"));
}

#[test]
fn invalid_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.toml");
    std::fs::write(&path, "scene = 4\n").unwrap();
    let out = run(&["compare", "--config", path.to_str().unwrap(), "--seeds", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn check_gradients_passes() {
    let out = run(&["check-gradients", "--instances", "5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("cbf"), "{stdout}");
}

#[test]
fn replay_matches_golden() {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data");
    let out = run(&["replay", "--script", &format!("{data}/teleop_script.jsonl"), "--steps", "70"]);
    assert!(out.status.success());
    let golden = std::fs::read_to_string(format!("{data}/teleop_golden.jsonl")).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden);
}
