use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn leasegame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leasegame"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("leasegame-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn solve_prints_outcome_json() {
    let out = leasegame(&["solve", "--s", "0.5", "--gamma", "0.1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["regime"], "B");
    let i_l = v["profile"]["I_L"].as_f64().unwrap();
    assert!((i_l - (2.0f64 / 4.5).sqrt()).abs() < 1e-12);
}

#[test]
fn sweep_csv_shape() {
    let out = leasegame(&["sweep", "--s-range", "0.5:0.9:0.1", "--gamma", "0.1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines[0].starts_with("s,gamma,c,regime,I_L,I_F"));
    assert!(lines.iter().all(|l| l.split(',').count() == 17));
}

#[test]
fn default_grid_drops_fees_below_gamma() {
    let out = leasegame(&["sweep", "--gamma", "0.15", "--format", "json-lines"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 86);
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["s"], 0.15);
}

#[test]
fn sweep_is_byte_identical_across_runs() {
    let args = ["sweep", "--gamma", "0.05", "--c", "0.5"];
    let a = leasegame(&args);
    let b = leasegame(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sweep_writes_file() {
    let path = scratch("sweep.csv");
    let out = leasegame(&["sweep", "--s", "0.81", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().contains(",A,"));
}

#[test]
fn literal_variant_is_flagged() {
    let out = leasegame(&["sweep", "--s", "0.5", "--gamma", "0", "--paper-literal-foc"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("paper_literal_foc"));
}

#[test]
fn benchmark_default_scenarios() {
    let out = leasegame(&["benchmark", "--s", "1", "--format", "json-lines"]);
    assert!(out.status.success());
    let rows: Vec<serde_json::Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(rows.len(), 3);
    let pi: Vec<f64> = rows.iter().map(|r| r["pi_L_B"].as_f64().unwrap()).collect();
    assert!((pi[0] - 0.25).abs() < 1e-6);
    assert!((pi[1] - 4.0 / 9.0).abs() < 1e-6);
    assert!((pi[2] - 1.0 / 9.0).abs() < 1e-6);
}

#[test]
fn verify_emits_passing_reports() {
    let out = leasegame(&[
        "verify",
        "--suite",
        "pricing",
        "--samples",
        "4",
        "--seed",
        "9",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["passed"], true);
    }
}

#[test]
fn validation_errors_exit_one() {
    for args in [
        vec!["solve", "--s", "0.05", "--gamma", "0.1"],
        vec!["solve", "--s=-1"],
        vec!["solve", "--s", "abc"],
        vec!["solve"],
        vec!["solve", "--s", "1", "--c", "-0.5"],
        vec!["sweep", "--s-range", "0.9:0.1:0.1"],
        vec!["benchmark", "--s", "1", "--tl", "0", "--tf", "0"],
    ] {
        let out = leasegame(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn io_errors_exit_two() {
    let out = leasegame(&["sweep", "--s", "0.5", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("/nonexistent-dir/x.csv"));
}
