use std::process::Command;

use clrank::cli::{run, CliOutput, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};
use serde_json::Value;

fn clrank(args: &[&str]) -> CliOutput {
    run(std::iter::once("clrank").chain(args.iter().copied()))
}

fn schema() -> jsonschema::Validator {
    let text = include_str!("../schema/report.schema.json");
    let schema: Value = serde_json::from_str(text).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

/// Runs with `--format json`, checks the exit code and validates the envelope.
fn json(args: &[&str], code: i32) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = clrank(&full);
    assert_eq!(out.code, code, "{args:?}: {}", out.stderr);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    let validator = schema();
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{args:?} violates schema: {errors:?}\n{v}");
    v
}

#[test]
fn moment_text_is_exact_first() {
    let out = clrank(&["moment", "--family", "class", "--lambda", "1", "--p", "3"]);
    assert_eq!(out.code, EXIT_PASS);
    assert_eq!(out.stdout.lines().next(), Some("2"));
    let out = clrank(&["moment", "--family", "class", "--u", "1", "--lambda", "1", "--p", "3"]);
    assert_eq!(out.stdout.lines().next(), Some("4/3"));
    let out = clrank(&["moment", "--family", "sha", "--lambda", "1", "--p", "2"]);
    assert_eq!(out.stdout.lines().next(), Some("3"));
}

#[test]
fn moment_json() {
    let v = json(&["moment", "--family", "selmer", "--alpha", "1/2", "--lambda", "1", "--p", "2"], EXIT_PASS);
    assert_eq!(v["command"], "moment");
    assert_eq!(v["pass"], true);
    assert_eq!(v["results"][0]["value"], "3/1");
}

#[test]
fn ranklaw_outputs_validate() {
    let v = json(&["ranklaw", "--family", "class", "--p", "3", "--joint", "0"], EXIT_PASS);
    let d = v["results"][0]["decimal"].as_str().unwrap();
    assert!(d.starts_with("0.5601260"), "{d}");
    json(&["ranklaw", "--family", "sha", "--p", "2", "--l", "2", "--k", "1"], EXIT_PASS);
    let v = json(&["ranklaw", "--family", "selmer", "--p", "2", "--l", "1", "--rank", "0"], EXIT_PASS);
    let d = v["results"][0]["decimal"].as_str().unwrap();
    assert!(d.starts_with("0.2097"), "{d}");
    let v = json(&["ranklaw", "--family", "class", "--p", "2", "--joint", "1"], EXIT_PASS);
    assert!(v["results"][0]["notes"].as_array().is_some_and(|n| !n.is_empty()));
}

#[test]
fn verify_outputs_validate() {
    json(&["verify", "tables"], EXIT_PASS);
    json(&["verify", "identity", "--p", "3", "--max-size", "4"], EXIT_PASS);
    json(&["verify", "limits"], EXIT_PASS);
    json(&["verify", "system", "--family", "class", "--p", "3", "--lambda", "1", "--R", "12"], EXIT_PASS);
    json(&["verify", "system", "--family", "selmer", "--p", "2", "--lambda", "1", "--delta", "1"], EXIT_PASS);
    json(&["verify", "usystem", "--mix", "3/10", "--p", "2"], EXIT_PASS);
    json(&["verify", "normalization", "--family", "sha", "--p", "3", "--l", "2"], EXIT_PASS);
    json(&["verify", "marginalization", "--family", "class", "--p", "3", "--l", "1", "--k", "1"], EXIT_PASS);
    let v = json(&["verify", "sample", "--family", "class", "--p", "3", "--n", "20000"], EXIT_PASS);
    assert_eq!(v["results"][0]["seed"], 1);
}

#[test]
fn failing_check_exits_one() {
    let v = json(&["verify", "usystem", "--mix", "3/10", "--p", "2", "--u", "1", "--lambda", "1"], EXIT_FAIL);
    assert_eq!(v["pass"], false);
    let out = clrank(&["verify", "system", "--family", "class", "--p", "3", "--lambda", "2", "--R", "1", "--tol", "1e-9"]);
    assert_eq!(out.code, EXIT_FAIL, "{}", out.stdout);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["moment", "--family", "class", "--lambda", "1,2", "--p", "3"][..],
        &["moment", "--family", "class", "--lambda", "1", "--p", "4"],
        &["moment", "--family", "nope", "--lambda", "1", "--p", "3"],
        &["ranklaw", "--family", "selmer", "--alpha", "3/2", "--p", "2", "--joint", "0"],
        &["ranklaw", "--family", "class", "--p", "3", "--joint", "0", "--l", "1"],
        &["ranklaw", "--family", "class", "--p", "3", "--l", "1", "--k", "0", "--tol", "0"],
        &["verify", "system", "--family", "sha", "--p", "3", "--lambda", "1", "--delta", "1"],
        &["frobnicate"],
    ] {
        let out = clrank(args);
        assert_eq!(out.code, EXIT_USAGE, "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

/// Field count of one CSV record, honouring double quotes.
fn csv_columns(line: &str) -> usize {
    let mut quoted = false;
    1 + line
        .chars()
        .filter(|&c| {
            if c == '"' {
                quoted = !quoted;
            }
            c == ',' && !quoted
        })
        .count()
}

#[test]
fn csv_has_header_and_rows() {
    let out = clrank(&["--format", "csv", "verify", "identity", "--p", "2", "--max-size", "3"]);
    assert_eq!(out.code, EXIT_PASS);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert!(lines.len() > 1);
    let cols = csv_columns(lines[0]);
    for l in &lines[1..] {
        assert_eq!(csv_columns(l), cols, "{l}");
    }
}

#[test]
fn sampling_is_deterministic() {
    let args = ["--format", "json", "verify", "sample", "--family", "sha", "--p", "3", "--seed", "7", "--n", "5000"];
    assert_eq!(clrank(&args), clrank(&args));
    let mut other = args;
    other[9] = "8";
    assert_ne!(clrank(&args).stdout, clrank(&other).stdout);
}

#[test]
fn digits_flag_and_env() {
    let bin = env!("CARGO_BIN_EXE_clrank");
    let args = ["ranklaw", "--family", "class", "--p", "3", "--joint", "0"];
    let with_env = Command::new(bin).args(args).env("CLRANK_DIGITS", "3").output().unwrap();
    assert_eq!(with_env.status.code(), Some(EXIT_PASS));
    let text = String::from_utf8(with_env.stdout).unwrap();
    assert!(text.contains("0.560") && !text.contains("0.5601"), "{text}");
    let flag = Command::new(bin)
        .args(args)
        .args(["--digits", "5"])
        .env("CLRANK_DIGITS", "3")
        .output()
        .unwrap();
    assert!(String::from_utf8(flag.stdout).unwrap().contains("0.56013"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_clrank");
    let ok = Command::new(bin).args(["verify", "tables"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_PASS));
    let bad = Command::new(bin).args(["moment", "--family", "class", "--lambda", "x", "--p", "3"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
}
