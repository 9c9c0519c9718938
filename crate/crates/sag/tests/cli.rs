use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sag::config::{Config, DEFAULT_CONFIG};
use sag::io::{read_alert_log, read_trace, write_alert_log};

fn sag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sag"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

/// Config with a short rolling window so replays stay quick.
fn small_config(dir: &Path) -> String {
    let text = DEFAULT_CONFIG
        .replace("days = 56", "days = 6")
        .replace("history_days = 41", "history_days = 4")
        .replace("test_days = 15", "test_days = 2");
    let path = dir.join("small.toml");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn generate_output_parses_back_losslessly() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("alerts.csv");
    let out = sag(&["generate", "--days", "3", "--seed", "5", "--out", log.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let bytes = fs::read(&log).unwrap();
    assert!(bytes.starts_with(b"cycle_id,timestamp_s,type_id\n"));
    let cycles = read_alert_log(&bytes[..], 7).unwrap();
    assert_eq!(cycles.len(), 3);
    let expected = sag_core::datagen::generate_cycles(&Config::default().generator_spec(), 3, 5).unwrap();
    assert_eq!(cycles, expected);

    let mut again = Vec::new();
    write_alert_log(&mut again, &cycles).unwrap();
    assert_eq!(again, bytes);
}

#[test]
fn simulate_trace_has_one_row_per_alert() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path());
    let log = dir.path().join("alerts.csv");
    let trace = dir.path().join("trace.csv");
    let summary = dir.path().join("summary.json");
    let gen = sag(&["--config", &config, "generate", "--out", log.to_str().unwrap()]);
    assert!(gen.status.success());

    let out = sag(&[
        "--config",
        &config,
        "simulate",
        "--input",
        log.to_str().unwrap(),
        "--budget",
        "50",
        "--alpha",
        "0.01",
        "--quit-loss",
        "-1",
        "--trace",
        trace.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let cycles = read_alert_log(&fs::read(&log).unwrap()[..], 7).unwrap();
    let replayed: usize = cycles[4..].iter().map(Vec::len).sum();
    let rows = read_trace(&fs::read(&trace).unwrap()[..]).unwrap();
    assert_eq!(rows.len(), replayed);
    assert!(rows.iter().all(|r| r.cycle_id >= 4));
    assert!(rows.iter().all(|r| ["warn", "silent", "none"].contains(&r.signal.as_str())));

    let s: serde_json::Value = serde_json::from_slice(&fs::read(&summary).unwrap()).unwrap();
    assert_eq!(s["alerts"].as_u64().unwrap() as usize, replayed);
    assert!(s["mean_advantage"].as_f64().unwrap() > 0.0);
    assert_eq!(s["days"].as_array().unwrap().len(), 2);
    assert!(s["runtime"]["mean_ms_per_alert"].as_f64().is_some());
}

#[test]
fn solve_with_no_budget_prints_the_silent_corner() {
    let out = sag(&["solve", "--budget", "0"]);
    assert!(out.status.success());
    let v = json(&out);
    for e in v["ossp"]["scheme"]["entries"].as_array().unwrap() {
        assert_eq!(e["q0"].as_f64(), Some(1.0));
        assert_eq!(e["p1"].as_f64(), Some(0.0));
    }
    assert!(v["online_sse"]["coverage"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c.as_f64() == Some(0.0)));
}

#[test]
fn solve_accepts_explicit_rates() {
    let out = sag(&["solve", "--budget", "5", "--lambdas", "10,2,8,1,2,1,3"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!(v["ossp"]["auditor_utility"].as_f64() >= v["online_sse"]["auditor_utility"].as_f64());
    let bad = sag(&["solve", "--budget", "5", "--lambdas", "1,2"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn verify_reports_no_violations() {
    let out = sag(&["verify", "--instances", "200", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["instances"], 200);
    assert!(v["violations"].as_array().unwrap().is_empty());
    let grid = v["grid"].as_array().unwrap();
    assert_eq!(grid.len(), 2);
    assert!(grid.iter().all(|g| g["within_bound"] == true));
}

#[test]
fn bench_passes_and_fails_on_threshold() {
    let ok = sag(&["bench", "--samples", "20"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["types"], 7);
    let strict = sag(&["bench", "--samples", "20", "--threshold-ms", "0"]);
    assert_eq!(strict.status.code(), Some(4));
}

#[test]
fn exit_codes_distinguish_config_and_data_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad_config = dir.path().join("bad.toml");
    fs::write(&bad_config, "budget = 'lots'").unwrap();
    let out = sag(&["--config", bad_config.to_str().unwrap(), "solve", "--budget", "1"]);
    assert_eq!(out.status.code(), Some(2));

    let bad_log = dir.path().join("bad.csv");
    fs::write(&bad_log, "cycle_id,timestamp_s,type_id\n0,99999,0\n").unwrap();
    let out = sag(&["fit", "--input", bad_log.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    let missing = sag(&["fit", "--input", dir.path().join("nope.csv").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(3));

    assert_eq!(sag(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(sag(&["--help"]).status.code(), Some(0));
}

#[test]
fn fit_reports_remaining_counts() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("alerts.csv");
    fs::write(&log, "cycle_id,timestamp_s,type_id\n0,10,0\n0,4000,0\n1,7300,1\n").unwrap();
    let out = sag(&["fit", "--input", log.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["cycles"], 2);
    let t0 = v["types"][0]["remaining"].as_array().unwrap();
    assert_eq!(t0[0].as_f64(), Some(1.0));
    assert_eq!(t0[1].as_f64(), Some(0.5));
    assert_eq!(t0[2].as_f64(), Some(0.0));
    assert_eq!(v["types"][1]["remaining"][2].as_f64(), Some(0.5));
}
