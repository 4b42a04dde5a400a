//! End-to-end runs of the `besselgap` executable.

use serde_json::Value;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_besselgap"))
        .args(args)
        .env_remove("BESSELGAP_JOBS")
        .output()
        .expect("the binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(o: &Output) -> Vec<Vec<String>> {
    stdout(o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn genfn_gives_one_row_with_both_routes() {
    let o = run(&["genfn", "--alpha", "0", "--r", "1", "--s", "0", "--x", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("x,F_fredholm,F_painleve,abs_diff,"), "{text}");
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 1);
    let f: f64 = rows[0][1].parse().unwrap();
    let p: f64 = rows[0][2].parse().unwrap();
    let d: f64 = rows[0][3].parse().unwrap();
    // α = 0: P(no particle in (0, 1)) = e^{−1/4}.
    assert!((f - (-0.25f64).exp()).abs() < 1e-12);
    assert!((p - f).abs() < 1e-7);
    assert_eq!(d, (p - f).abs());
}

#[test]
fn equal_adjacent_multipliers_are_a_validation_error() {
    let o = run(&["genfn", "--alpha", "0", "--r", "1,2", "--s", "1,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn unknown_or_missing_commands_exit_with_usage() {
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn malformed_values_exit_with_status_two() {
    assert_eq!(run(&["genfn", "--alpha", "zero"]).status.code(), Some(2));
    assert_eq!(run(&["kth-cdf", "--alpha", "0", "--x", "1"]).status.code(), Some(2));
    assert_eq!(run(&["count-dist", "--alpha", "0", "--x", "1:2"]).status.code(), Some(2));
    assert_eq!(run(&["gap", "--alpha", "-2", "--intervals", "0:1"]).status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_status_three() {
    // Eight roots of unity cannot hold the count distribution at x = 200.
    let o = run(&["count-dist", "--alpha", "0", "--x", "200", "--terms", "8"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn selfcheck_passes() {
    let o = run(&["selfcheck"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let rows = csv_rows(&o);
    assert!(rows.len() >= 8);
    assert!(rows.iter().all(|r| r[3] == "true"), "{}", stdout(&o));
}

#[test]
fn output_is_byte_identical_across_runs_and_worker_counts() {
    let args = ["thinned", "--alpha", "0.5", "--s-thin", "0.3", "--x", "0.5:4:6", "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    let mut with_jobs: Vec<&str> = args.to_vec();
    with_jobs.extend(["--jobs", "1"]);
    let c = run(&with_jobs);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);

    let sample = ["sample-lue", "--alpha", "0.5", "--n", "5", "--seed", "11", "--draws", "3"];
    assert_eq!(run(&sample).stdout, run(&sample).stdout);
}

#[test]
fn json_output_follows_the_schema() {
    let o = run(&["genfn", "--alpha", "0.5", "--r", "1,2", "--s", "0.2,0.6", "--x", "1,2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["command"], "genfn");
    assert_eq!(v["config"]["options"]["alpha"], 0.5);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for row in rows {
        for key in ["x", "F_fredholm", "F_painleve", "abs_diff", "log_F_fredholm", "m_final"] {
            assert!(row.get(key).is_some(), "{key} missing in {row}");
        }
    }
    let d = &v["diagnostics"];
    assert!(d["m_final"].as_u64().unwrap() >= 16);
    assert!(d["eps"].as_f64().unwrap() > 0.0);
    assert!(d["route_discrepancy"].as_f64().unwrap() < 1e-7);
}

#[test]
fn config_file_supplies_defaults_under_the_flags() {
    let dir = std::env::temp_dir().join(format!("besselgap-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("config.json");
    std::fs::write(&path, r#"{"alpha": 3.0, "ell": 1, "x": [2.0]}"#).unwrap();
    let p = path.to_str().unwrap();
    // The flag α = 0 overrides the file; ℓ and x come from the file.
    let o = run(&["kth-cdf", "--config", p, "--alpha", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: f64 = csv_rows(&o)[0][2].parse().unwrap();
    assert!((v - (-0.5f64).exp()).abs() < 1e-10);

    std::fs::write(&path, r#"{"alpah": 0}"#).unwrap();
    assert_eq!(run(&["kth-cdf", "--config", p]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn gap_on_a_union_matches_the_single_interval_when_the_second_is_tiny() {
    let one = run(&["gap", "--alpha", "0", "--intervals", "0:1"]);
    let two = run(&["gap", "--alpha", "0", "--intervals", "0:1,5:5.000001"]);
    let a: f64 = csv_rows(&one)[0][0].parse().unwrap();
    let b: f64 = csv_rows(&two)[0][0].parse().unwrap();
    assert!(b < a && a - b < 1e-6, "{a} {b}");
}
