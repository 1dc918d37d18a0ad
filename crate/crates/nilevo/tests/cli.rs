use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilevo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn classify_reports_e3() {
    let out = run(&["classify", "--algebra", &fixture("e3.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = &report(&out)["results"];
    assert_eq!(r["canonical"], true);
    assert_eq!(r["rank"], 2);
    assert_eq!(r["nilpotency_index"], 5);
    assert_eq!(r["I_A"], serde_json::json!([]));
    assert_eq!(r["eta"], Value::Null);
}

#[test]
fn classify_reports_e4_eta() {
    let out = run(&["classify", "--algebra", &fixture("e4.json")]);
    let r = &report(&out)["results"];
    assert_eq!(r["case"], "nonempty_IA");
    assert_eq!(r["eta"], 2);
    assert_eq!(r["I_A"], serde_json::json!([[1, 3]]));
}

#[test]
fn exp_on_e4_is_a_corner_translation() {
    let out = run(&[
        "exp",
        "--algebra",
        &fixture("e4.json"),
        "--alpha",
        "0",
        "--beta",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = &report(&out)["results"];
    let expected: Vec<Vec<String>> = (0..4)
        .map(|i| {
            (0..4)
                .map(|j| if i == j || (i, j) == (0, 3) { "1" } else { "0" }.to_string())
                .collect()
        })
        .collect();
    assert_eq!(r["matrix"], serde_json::to_value(expected).unwrap());
    assert_eq!(r["series_closed_diff"], 0.0);
    assert_eq!(
        report(&out)["warnings"].as_array().unwrap().len(),
        1,
        "rational promotion is reported"
    );
}

#[test]
fn verify_is_deterministic_for_a_seed() {
    let args = ["verify", "--algebra", &fixture("e4.json"), "--seed", "7"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(
        first.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&first.stdout)
    );
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(report(&first)["results"]["all_passed"], true);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ \"dimension\": 3, ").unwrap();
    assert_eq!(
        run(&["classify", "--algebra", bad.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["classify"]).status.code(), Some(2));
    assert_eq!(
        run(&["classify", "--algebra", "/nonexistent/e.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn domain_errors_exit_one() {
    let out = run(&["aut", "--algebra", &fixture("e4.json"), "--alpha", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lower.json");
    std::fs::write(
        &path,
        r#"{"dimension": 2, "field": "rational", "matrix": [["0", "0"], ["1", "0"]]}"#,
    )
    .unwrap();
    assert_eq!(
        run(&["derive", "--algebra", path.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let dest = dir.path().join("report.json");
    let out = run(&[
        "derive",
        "--algebra",
        &fixture("e3.json"),
        "--m",
        "2",
        "--out",
        dest.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&dest).unwrap()).unwrap();
    assert_eq!(written["command"], "derive");
    assert_eq!(written["results"]["der_dimension"], 2);
    assert_eq!(written["results"]["power"]["m"], 2);
}

#[test]
fn ode_writes_csv_and_summary() {
    let out = run(&[
        "ode",
        "--algebra",
        &fixture("e5_real.json"),
        "--alpha",
        "0.1",
        "--steps",
        "50",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,x1,x2,x3,x4,x5"));
    assert_eq!(lines.count(), 51);
    let summary: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(summary["results"]["relative_error"].as_f64().unwrap() < 1e-6);
}

#[test]
fn ode_rejects_a_mismatched_initial_state() {
    let out = run(&["ode", "--algebra", &fixture("e3.json"), "--x0", "1,2"]);
    assert_eq!(out.status.code(), Some(2));
}
