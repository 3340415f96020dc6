use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvesamp")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn params_reports_outer_dimensions() {
    let v = json(&["params", "--q", "16", "--m", "4", "--delta", "2^-8"]);
    assert_eq!(v["outer"]["n"], 19);
    assert_eq!(v["outer"]["d"], 3);
    assert_eq!(v["ledger_ok"], true);
    assert_eq!(v["delta"], "1/256");
}

#[test]
fn params_accepts_q_relative_delta() {
    let a = json(&["params", "--q", "16", "--m", "4", "--delta", "q^-2"]);
    let b = json(&["params", "--q", "2^4", "--m", "4", "--delta", "1/256"]);
    assert_eq!(a, b);
}

#[test]
fn verify_curve_passes() {
    let v = json(&["verify", "--q", "5", "--m", "1", "--curve-t", "3"]);
    assert_eq!(v["ok"], true);
    let tw = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "t-wise-independence").unwrap();
    assert_eq!(tw["status"], "PASS");
}

#[test]
fn verify_constructed_sampler() {
    let v = json(&["verify", "--q", "16", "--m", "2", "--delta", "2^-8", "--sampler", "outer"]);
    assert_eq!(v["ok"], true);
    assert!(v["checks"].as_array().unwrap().iter().any(|c| c["name"] == "wiring" && c["status"] == "PASS"));
}

#[test]
fn eval_line_over_f3() {
    let v = json(&["eval", "--q", "3", "--m", "1", "--family", "explicit:0", "--epsilon", "0.1", "--mode", "exact"]);
    assert_eq!(v[0]["delta_hat"], "1/3");
    assert_eq!(v[0]["trials"], 9);
}

#[test]
fn mc_reports_are_byte_identical() {
    let args = ["eval", "--q", "5", "--m", "2", "--family", "all", "--mode", "mc", "--trials", "3000", "--seed", "11"];
    let (a, b) = (run(&args), run(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sample_lists_every_seed() {
    let out = run(&["sample", "--q", "2^3", "--m", "2", "--x", "1,2,3,4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "seed_index,y0,s0,s1");
    assert_eq!(lines.len(), 9);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 4));
    let bad = run(&["sample", "--q", "5", "--m", "1", "--x", "1,7"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn bounds_table() {
    let v = json(&["bounds", "--q", "32", "--epsilon", "0.5", "--source-k", "3", "--source-n", "5"]);
    let rows = v.as_array().unwrap();
    assert_eq!(rows[0]["bound"]["exact"], "1/8");
    assert!(rows.iter().any(|r| r["bound"]["kind"] == "equiv-two" && r["bound"]["exact"] == "1/512"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["params", "--q", "6", "--m", "1", "--delta", "1/4"]).status.code(), Some(2));
    assert_eq!(run(&["params", "--q", "16", "--m", "1", "--delta", "2"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--q", "32", "--m", "2", "--cap-states", "100"]).status.code(), Some(3));
    assert_eq!(run(&["eval", "--q", "5", "--cap-states", "0"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let report = dir.path().join("report.json");
    let args = ["eval", "--q", "5", "--m", "1", "--family", "hyperplanes", "--epsilon", "1/5", "--print-config"];
    let printed = run(&args);
    assert!(printed.status.success());
    std::fs::write(&cfg, &printed.stdout).unwrap();
    let direct = run(&args[..args.len() - 1]);
    let from_file = run(&["eval", "--config", cfg.to_str().unwrap(), "--out", report.to_str().unwrap()]);
    assert!(from_file.status.success());
    assert!(from_file.stdout.is_empty());
    assert_eq!(std::fs::read(&report).unwrap(), direct.stdout);
}
