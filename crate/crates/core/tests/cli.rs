use std::process::Command;

use serde_json::Value;

fn diffset(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_diffset"))
        .args(args)
        .env_remove("DIFFSET_JOBS")
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(s: &str) -> Value {
    serde_json::from_str(s.trim()).unwrap()
}

#[test]
fn compute_minimal_d_forced() {
    let (code, out, _) = diffset(&["compute", "minimal_d", "--q", "4", "--A", "{0,2}", "--B", "{0,2}"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["d"], 4);
}

#[test]
fn compute_cov_times_has_witness() {
    let (code, out, _) = diffset(&[
        "compute",
        "cov",
        "--kind",
        "times",
        "--q",
        "13",
        "--S",
        "{5,6,7,8}",
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["k"], 5);
    assert_eq!(v["certificate"]["verified"], true);
}

#[test]
fn compute_kloosterman_value() {
    let (_, out, _) = diffset(&["compute", "kloosterman", "--q", "5", "--lam", "1", "--r", "1"]);
    let re = json(&out)["re"].as_f64().unwrap();
    assert!((re - 0.381966).abs() < 1e-6);
}

#[test]
fn compute_two_dimensional_inputs() {
    let (code, out, _) = diffset(&[
        "compute",
        "minimal_d",
        "--q",
        "9",
        "--A",
        "{(0,0),(0,3),(3,0),(3,3)}",
        "--B",
        "{(1,1),(1,4),(4,1),(4,4)}",
        "--mode",
        "full",
    ]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["d"], Value::Null);
    let (code, out, _) = diffset(&[
        "compute",
        "regularize",
        "--A",
        "q=12; {0,3,6,9}",
        "--eps",
        "0.5",
        "--m",
        "2",
    ]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["q_star"], 4);
}

#[test]
fn malformed_literal_is_an_error() {
    let (code, out, err) = diffset(&["compute", "diffset", "--q", "7", "--A", "{0,,x}"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("error"));
}

#[test]
fn unknown_suite_rejected() {
    let (code, _, err) = diffset(&["verify", "nosuch"]);
    assert_ne!(code, 0);
    assert!(err.contains("invalid value"));
}

#[test]
fn verify_streams_json_lines() {
    let (code, out, _) = diffset(&["verify", "covm", "--q", "11", "--exhaustive"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2047);
    for l in lines {
        let v = json(l);
        assert_eq!(v["suite"], "covm");
        assert_ne!(v["pass"], false);
        assert_eq!(v["runtime_ms"], 0);
    }
}

#[test]
fn weil_range_sweep() {
    let (code, out, _) = diffset(&["verify", "weil", "--q", "2..100"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 99);
}

#[test]
fn schur_growth_csv() {
    let (code, out, _) = diffset(&["verify", "schur", "--q", "7,13", "--csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(
        lines,
        ["p,|S|,cov_plus,cov_times,gap", "7,2,4,4,6", "13,4,4,5,10"]
    );
}

#[test]
fn jobs_env_default_matches_flag() {
    let args = ["verify", "fish1d", "--q", "12", "--samples", "10", "--seed", "3"];
    let (_, serial, _) = diffset(&args);
    let out = Command::new(env!("CARGO_BIN_EXE_diffset"))
        .args(args)
        .env("DIFFSET_JOBS", "3")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), serial);
}

#[test]
fn search_zero_budget_and_rerun() {
    let args = [
        "search", "max_covx", "--q", "31", "--alpha", "0.2", "--budget", "50", "--seed", "1",
    ];
    let (code, a, _) = diffset(&args);
    assert_eq!(code, 0);
    let (_, b, _) = diffset(&args);
    assert_eq!(a, b);
    assert_eq!(json(&a)["certificate"]["verified"], true);
    let (code, out, _) = diffset(&["search", "max_d", "--q", "30", "--beta", "0.25", "--budget", "0"]);
    assert_eq!(code, 0);
    assert!(json(&out)["divisors"]
        .as_array()
        .unwrap()
        .contains(&json(&out)["d"]));
}

#[test]
fn failing_rows_replay_through_compute() {
    // a row's instance carries the literals needed for compute
    let (_, out, _) = diffset(&["verify", "fish1d", "--q", "30", "--samples", "1", "--seed", "9"]);
    let row = json(out.lines().next().unwrap());
    let inst = &row["instance"];
    let q = inst["q"].to_string();
    let (code, replay, _) = diffset(&[
        "compute",
        "minimal_d",
        "--q",
        &q,
        "--A",
        inst["A"].as_str().unwrap(),
        "--B",
        inst["B"].as_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(json(&replay)["d"], row["witness"]["d"]);
}
