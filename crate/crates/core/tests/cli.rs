use std::fs::File;
use std::path::Path;
use std::process::{Command, Output};

use sparse_toeplitz::harness::data::write_samples;
use sparse_toeplitz::sampler::sample_gaussian;
use sparse_toeplitz::{RngStream, ToeplitzSpec};
use tempfile::TempDir;

fn toeplitz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toeplitz")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_data(dir: &Path, spec: &ToeplitzSpec, n: usize) -> String {
    let samples = sample_gaussian(spec, n, RngStream::new(7, 0)).unwrap();
    let path = dir.join("samples.csv");
    write_samples(&samples, File::create(&path).unwrap()).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn thresholds_prints_closed_form_value() {
    let out = toeplitz(&["thresholds", "--kind", "ms+", "--u", "4", "--n", "100", "--p", "100", "--S", "10"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("kind,u,n,p,S,s,threshold,separation_radius"));
    assert!(text.contains("0.066667"), "{text}");
}

#[test]
fn thresholds_separation_with_sparsity() {
    let out = toeplitz(&[
        "thresholds", "--kind", "ms+", "--u", "4", "--n", "100", "--p", "100", "--S", "10", "--s", "2",
    ]);
    assert!(stdout(&out).contains("0.200000"));
}

#[test]
fn exit_codes_distinguish_config_and_runtime_errors() {
    assert_eq!(toeplitz(&["--help"]).status.code(), Some(0));
    assert_eq!(toeplitz(&["no-such-command"]).status.code(), Some(1));
    let bad_horizon = toeplitz(&["thresholds", "--kind", "ms", "--n", "10", "--p", "4", "--S", "10"]);
    assert_eq!(bad_horizon.status.code(), Some(1));
    let missing = toeplitz(&["test", "--kind", "ms", "--data", "/nonexistent/samples.csv", "--R", "10"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn bad_config_file_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"scenario": "power_curve", "not_a_field": 1}"#).unwrap();
    let out = toeplitz(&["power-curve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn power_curve_writes_csv_with_header() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"scenario": "power_curve", "n": 30, "p": 20, "R": 200, "grid_points": 3, "master_seed": 5}"#,
    )
    .unwrap();
    let csv = dir.path().join("x.csv");
    let out = toeplitz(&["power-curve", "--config", cfg.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("kind,sigma,separation,log10_separation,power,se,R"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').skip(1).map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        let (power, se, r) = (row[3], row[4], row[5]);
        assert!((se - (power * (1.0 - power) / r).sqrt()).abs() <= 1e-12);
    }
}

#[test]
fn flags_override_config_values() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"scenario": "power_curve", "n": 30, "p": 20, "R": 100, "grid_points": 2}"#).unwrap();
    let out = toeplitz(&["power-curve", "--config", cfg.to_str().unwrap(), "--R", "50", "--seed", "1"]);
    assert!(out.status.success());
    assert!(stdout(&out).lines().skip(1).all(|l| l.ends_with(",50")));
}

#[test]
fn test_subcommand_prints_one_verdict() {
    let dir = TempDir::new().unwrap();
    let spec = ToeplitzSpec::with_lags(40, 1.0, &[(2, 0.3), (3, -0.2)]).unwrap();
    let data = write_data(dir.path(), &spec, 60);
    let out = toeplitz(&[
        "test", "--kind", "hs", "--s", "3", "--data", &data, "--threshold-source", "calibrated", "--R", "300",
        "--seed", "3",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1);
    assert!(text.contains("statistic=") && text.contains("threshold="));
    assert!(text.contains("decision=reject"), "{text}");
}

#[test]
fn test_subcommand_accepts_null_data() {
    let dir = TempDir::new().unwrap();
    let data = write_data(dir.path(), &ToeplitzSpec::identity(40), 60);
    let out = toeplitz(&["test", "--kind", "ms", "--data", &data, "--threshold-source", "theoretical"]);
    assert!(stdout(&out).contains("decision=accept"));
}

#[test]
fn select_recovers_strong_lags() {
    let dir = TempDir::new().unwrap();
    let spec = ToeplitzSpec::with_lags(40, 1.0, &[(1, 0.3), (4, 0.25)]).unwrap();
    let data = write_data(dir.path(), &spec, 500);
    let out = toeplitz(&["select", "--data", &data, "--S", "6", "--s", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("selected=1,4"), "{text}");
}
