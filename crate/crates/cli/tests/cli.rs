use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn qledger(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qledger"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qledger-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn error_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().unwrap_or_default();
    serde_json::from_str(line).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {text}"))
}

fn diag(values: &[f64]) -> Value {
    let n = values.len();
    let mut re = vec![0.0; n * n];
    for (i, v) in values.iter().enumerate() {
        re[i * n + i] = *v;
    }
    json!({ "dim": n, "re": re, "im": vec![0.0; n * n] })
}

#[test]
fn help_exits_zero() {
    let out = qledger(&["--help"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("example1"));
}

#[test]
fn unknown_config_key_is_a_validation_error() {
    let out = qledger(&["example1", "--override", "lamda=1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = error_json(&out);
    assert_eq!(err["error"], "validation");
    assert!(err["detail"].as_str().unwrap().contains("lamda"));
}

#[test]
fn cross_example_key_is_rejected() {
    let out = qledger(&["example1", "--override", "g=0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_json(&out)["error"], "validation");
}

#[test]
fn bad_parameter_exits_two() {
    let out = qledger(&["example2", "--override", "beta=-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_json(&out)["error"], "parameter");
}

#[test]
fn missing_config_file_is_io() {
    let out = qledger(&["example1", "--config", "/nonexistent/qledger.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_json(&out)["error"], "io");
}

#[test]
fn bad_flag_is_usage() {
    let out = qledger(&["example1", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_json(&out)["error"], "usage");
}

#[test]
fn override_beats_config_and_flag_beats_both() {
    let dir = scratch("precedence");
    let cfg = dir.join("cfg.json");
    let from_cfg = dir.join("from_cfg.csv");
    let from_flag = dir.join("from_flag.csv");
    fs::write(
        &cfg,
        json!({ "example": 1, "R": 5.0, "t_max": 1.0, "steps": 100, "out": from_cfg }).to_string(),
    )
    .unwrap();
    let out = qledger(&[
        "example1",
        "--config",
        cfg.to_str().unwrap(),
        "--override",
        "R=0.3",
        "--out",
        from_flag.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(!from_cfg.exists());
    let csv = fs::read_to_string(&from_flag).unwrap();
    assert!(csv.starts_with("# qledger example1"));
    assert!(csv.contains("\"R\":0.3"));
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 102);
}

#[test]
fn example_runs_are_byte_identical() {
    let args = [
        "example2",
        "--override",
        "case=2",
        "--override",
        "t_max=2",
        "--override",
        "beta=1",
    ];
    let a = qledger(&args);
    let b = qledger(&args);
    assert!(a.status.success());
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn example2_writes_svg_and_plot_reads_csv() {
    let dir = scratch("svg");
    let csv = dir.join("e2.csv");
    let svg = dir.join("e2.svg");
    let out = qledger(&[
        "example2",
        "--override",
        "t_max=3",
        "--out",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<?xml"));
    assert!(text.contains("C_r") && text.contains("P_c"));

    let plotted = dir.join("plot.svg");
    let out = qledger(&[
        "plot",
        csv.to_str().unwrap(),
        "--columns",
        "E,W_f",
        "--svg",
        plotted.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        fs::read_to_string(&plotted)
            .unwrap()
            .matches("<polyline")
            .count(),
        2
    );

    let out = qledger(&["plot", csv.to_str().unwrap(), "--columns", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ledger_identity_process_is_all_zero() {
    let dir = scratch("ledger-id");
    let cfg = dir.join("ledger.json");
    fs::write(
        &cfg,
        json!({ "rho0": diag(&[0.3, 0.7]), "h0": diag(&[0.0, 1.0]), "rho_tau": diag(&[0.3, 0.7]), "beta": 1.0 })
            .to_string(),
    )
    .unwrap();
    let out = qledger(&["ledger", "--config", cfg.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let ledger: Value = serde_json::from_slice(&out.stdout).unwrap();
    for (key, value) in ledger.as_object().unwrap() {
        assert!(value.as_f64().unwrap().abs() < 1e-12, "{key} = {value}");
    }
}

#[test]
fn ledger_thermalization_from_files() {
    let dir = scratch("ledger-therm");
    fs::write(dir.join("rho0.json"), diag(&[0.0, 1.0]).to_string()).unwrap();
    fs::write(dir.join("h.json"), diag(&[0.0, 1.0]).to_string()).unwrap();
    let z = 1.0 + (-1.0f64).exp();
    fs::write(
        dir.join("pi.json"),
        diag(&[1.0 / z, (-1.0f64).exp() / z]).to_string(),
    )
    .unwrap();
    let cfg = dir.join("ledger.json");
    fs::write(
        &cfg,
        json!({ "rho0": "rho0.json", "h0": "h.json", "rho_tau": "pi.json", "beta": 1.0 })
            .to_string(),
    )
    .unwrap();
    let out = qledger(&["ledger", "--config", cfg.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let ledger: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((ledger["deltaWf"].as_f64().unwrap() + 1.313262).abs() < 1e-6);
    assert!(ledger["residual_eq2"].as_f64().unwrap().abs() < 1e-9);
    assert!(ledger["residual_eq7"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn ledger_needs_exactly_one_final_state() {
    let dir = scratch("ledger-both");
    let cfg = dir.join("ledger.json");
    let rho = diag(&[0.5, 0.5]);
    fs::write(
        &cfg,
        json!({ "rho0": rho, "h0": diag(&[0.0, 1.0]), "beta": 1.0 }).to_string(),
    )
    .unwrap();
    let out = qledger(&["ledger", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_json(&out)["error"], "validation");
}

#[test]
fn audit_passes_and_is_reproducible() {
    let a = qledger(&["audit", "--seed", "7", "--count", "50"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stdout));
    let b = qledger(&["audit", "--seed", "7", "--count", "50"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(qledger(&["audit", "--count", "0"]).status.success());
}

#[test]
fn audit_expect_violation_reports_negative_entropy_production() {
    let dir = scratch("audit");
    let report = dir.join("report.json");
    let out = qledger(&[
        "audit",
        "--expect-violation",
        "--count",
        "20",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let report: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(report["negative_delta_s_ir"].as_u64().unwrap() > 0);
    assert!(report["min_delta_s_ir"].as_f64().unwrap() < 0.0);

    // No cases, nothing to violate: the expectation fails.
    let out = qledger(&["audit", "--expect-violation", "--count", "0"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(error_json(&out)["error"], "property_violation");
}
