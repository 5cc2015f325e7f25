use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hypersoliton"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn report(stdout: &str) -> Value {
    let doc: Value = serde_json::from_str(stdout).expect("valid JSON");
    assert_eq!(doc["schema"], 1);
    doc["report"].clone()
}

#[test]
fn verify_hypercylinder_and_sphere() {
    let (code, out, _) = run(&["verify", "spherical-hypercylinder", "--param", "n=4", "--param", "k=2"]);
    assert_eq!(code, 0);
    let r = report(&out);
    assert!((r["soliton"]["lambda_star"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(r["soliton"]["classification"], "shrinking");
    assert_eq!(r["soliton"]["prop41"]["all_ok"], true);

    let (code, out, _) = run(&["verify", "hypersphere", "--param", "n=2", "--param", "r=2", "--json"]);
    assert_eq!(code, 0);
    assert!((report(&out)["soliton"]["lambda_star"].as_f64().unwrap() - 0.25).abs() < 1e-10);
}

#[test]
fn verify_rotational_reports_not_soliton() {
    let (code, out, _) = run(&["verify", "rotational-case-i", "--param", "b=1"]);
    assert_eq!(code, 0);
    let r = report(&out);
    assert_eq!(r["soliton"]["verdict"], "not-soliton");
    assert!(r["rotational_crosscheck"]["rows"].as_array().is_some());
}

#[test]
fn probe_entry_carries_claim_block() {
    let (code, out, err) = run(&["verify", "circular-hypercylinder", "--param", "n=3", "--param", "r=1"]);
    assert_eq!(code, 0);
    let c = &report(&out)["claim_check"];
    assert_eq!(c["source"], "Example 5.1");
    assert_eq!(c["claim_supported"], false);
    assert_eq!(c["direction_lambdas"].as_array().unwrap().len(), 3);
    assert!(err.contains("claim vs oracle"));
}

#[test]
fn json_output_is_byte_stable() {
    let args = ["verify", "fixture-6-84"];
    assert_eq!(run(&args).1, run(&args).1);
}

#[test]
fn usage_and_numerical_exit_codes() {
    assert_eq!(run(&["verify", "hypersphere", "--param", "r=-1"]).0, 2);
    assert_eq!(run(&["verify", "no-such-entry"]).0, 2);
    assert_eq!(run(&["verify", "hypersphere", "--param", "r"]).0, 2);
    assert_eq!(run(&["scan", "hypersphere", "--param", "r", "--range", "3:1"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    // a sphere this small has a numerically singular metric
    let (code, _, err) = run(&["verify", "hypersphere", "--param", "r=1e-6"]);
    assert_eq!(code, 3);
    assert!(err.contains("positive definite"));
}

#[test]
fn scan_csv_has_fixed_header_and_sorted_rows() {
    let (code, out, _) = run(&["scan", "hypersphere", "--param", "r", "--range", "3:1:3", "--set", "n=2", "--csv"]);
    assert_eq!(code, 0);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(rdr.headers().unwrap(), vec!["r", "lambda_star", "residual_max", "verdict"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    for row in &rows {
        let r: f64 = row[0].parse().unwrap();
        let l: f64 = row[1].parse().unwrap();
        assert!((l - 1.0 / (r * r)).abs() < 1e-10);
        assert_eq!(&row[3], "soliton");
    }
    assert!(rows[0][0].parse::<f64>().unwrap() < rows[2][0].parse::<f64>().unwrap());
}

#[test]
fn identity_suite_and_negative_control() {
    assert_eq!(run(&["identity-suite"]).0, 0);
    assert_eq!(run(&["identity-suite", "--seed", "7", "--csv"]).0, 0);
    let (code, _, err) = run(&["identity-suite", "--inject-fault"]);
    assert_eq!(code, 1);
    assert!(err.contains("concurrent-identity"));
}

#[test]
fn fixtures_table_passes() {
    let (code, out, _) = run(&["fixtures"]);
    assert_eq!(code, 0);
    let rows = report(&out);
    let ids: Vec<&str> = rows.as_array().unwrap().iter().map(|r| r["id"].as_str().unwrap()).collect();
    for id in ["(6.37)", "(6.58)", "(6.35)-probe"] {
        assert!(ids.contains(&id), "{id}");
    }
}

#[test]
fn report_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let (code, out, _) = run(&["verify", "hyperplane", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(report(&text)["expectation_met"], true);
}

#[test]
fn list_names_every_entry() {
    let (code, out, _) = run(&["list", "--csv"]);
    assert_eq!(code, 0);
    for id in ["hyperplane", "hypersphere", "cone-flat", "fixture-6-84", "rotational-case-ii"] {
        assert!(out.contains(id));
    }
}
