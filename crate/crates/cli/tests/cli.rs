use std::process::{Command, Output};

use serde_json::Value;

fn qwl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwl")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = qwl(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn close(v: &Value, x: f64) -> bool {
    (v.as_f64().unwrap() - x).abs() < 1e-10
}

#[test]
fn witness_examples() {
    let r = json(&["witness", "ghz-tripartite", "--d", "4", "--c", "0.75"]);
    assert!(close(&r["value"], 4.0) && close(&r["bound"], 3.0));
    assert_eq!(r["violated"], true);

    let r = json(&["witness", "coherence", "--d", "3", "--c", "0.9", "--state", "basis0"]);
    assert!(close(&r["value"], 0.0));
    assert_eq!(r["violated"], false);

    let r = json(&["witness", "two-qutrit", "--c", "0.5"]);
    assert!(close(&r["value"], 2.0));
    assert_eq!(r["violated"], true);

    let r = json(&["witness", "two-qutrit", "--c", "0.5", "--weights", "1,0,0"]);
    assert!(close(&r["value"], 1.0));
    assert_eq!(r["violated"], true);
}

#[test]
fn basis_pair_reports_joint_verdict() {
    let r = json(&["witness", "basis-pair", "--n", "3", "--c", "0.5"]);
    assert_eq!(r["reports"].as_array().unwrap().len(), 2);
    assert_eq!(r["joint_verdict"], true);
    let r = json(&["witness", "basis-pair", "--d", "4", "--power", "2", "--state", "mixed"]);
    assert_eq!(r["reports"].as_array().unwrap().len(), 4);
    assert_eq!(r["joint_verdict"], false);
}

#[test]
fn lhv_examples() {
    let r = json(&["lhv", "hardy", "--d", "4"]);
    assert_eq!(r["feasible"], false);
    assert_eq!(r["max_satisfiable"], 3);

    let r = json(&["lhv", "higher-power", "--d", "4", "--power", "2"]);
    assert_eq!(r["feasible"], false);
    assert!(r["contradiction_equation"].as_str().unwrap().contains("mod 4"));

    let r = json(&["lhv", "hardy", "--d", "3"]);
    assert_eq!(r["feasible"], true);
    assert!(r["witness_assignment"].is_object());

    let r = json(&["lhv", "max-tripartite", "--d", "4"]);
    assert!(r["lhv_max"].is_f64() && close(&r["paper_bound"], 3.0));
}

#[test]
fn cv_examples() {
    let r = json(&["cv", "duan-simon", "--g", "0.5", "--nmax", "60"]);
    assert!((r["duan_simon_sum"].as_f64().unwrap() - 0.735759).abs() < 1e-6);
    assert!((r["analytic_value"].as_f64().unwrap() - 2.0 * (-1.0f64).exp()).abs() < 1e-14);
    assert!(close(&r["separable_bound"], 2.0));

    let r = json(&["cv", "duan-simon", "--g", "0"]);
    assert!(close(&r["duan_simon_sum"], 2.0));

    let r = json(&["cv", "logical-coherence", "--g", "0.5"]);
    assert!(r["difference"].as_f64().unwrap() < 1e-10);
}

#[test]
fn stabilizer_examples_and_negative_control() {
    for (d, n) in [("3", "2"), ("4", "3")] {
        let r = json(&["stabilizer", "verify", "--d", d, "--n", n]);
        assert_eq!(r["all_passed"], true, "d={d} n={n}");
    }
    let r = json(&["stabilizer", "verify", "--d", "3", "--n", "2", "--corrupt"]);
    assert_eq!(r["all_passed"], false);
    let additive = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "additive").unwrap();
    assert_eq!(additive["passed"], false);

    let r = json(&["stabilizer", "export", "--d", "2", "--n", "2"]);
    assert_eq!(r["elements"].as_array().unwrap().len(), 4);
}

#[test]
fn tables_row_counts() {
    for (id, rows) in [(1, 5), (2, 3), (3, 3), (4, 5), (5, 5)] {
        let r = json(&["tables", "--id", &id.to_string()]);
        assert_eq!(r["rows"].as_array().unwrap().len(), rows, "table {id}");
    }
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    let args = ["witness", "separable-bound", "--starts", "200", "--seed", "7"];
    let a = qwl(&args);
    let b = qwl(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let a = qwl(&["tables", "--id", "2"]);
    assert_eq!(a.stdout, qwl(&["tables", "--id", "2"]).stdout);
}

#[test]
fn csv_has_header_and_one_line_per_row() {
    let out = qwl(&["tables", "--id", "4", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().unwrap().clone();
    assert!(header.iter().any(|h| h == "weights") && header.iter().any(|h| h == "verdict"));
    assert_eq!(rdr.records().count(), 5);

    let out = qwl(&["cv", "duan-simon", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("g,n_max,duan_simon_sum"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn text_format_and_out_file() {
    let out = qwl(&["witness", "coherence", "--format", "text"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("violated: true"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = qwl(&["witness", "coherence", "--out", path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert!(close(&r["value"], 1.0));
}

#[test]
fn state_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi.json");
    let h = std::f64::consts::FRAC_1_SQRT_2;
    std::fs::write(&path, format!(r#"{{"dims":[2],"amplitudes":[[{h},0],[{h},0]]}}"#)).unwrap();
    let p = path.to_str().unwrap();
    let r = json(&["witness", "coherence", "--d", "2", "--c", "0.5", "--state", p]);
    assert!(close(&r["value"], 1.0));

    // wrong dimension for the witness
    assert_eq!(qwl(&["witness", "coherence", "--d", "3", "--state", p]).status.code(), Some(2));
    std::fs::write(&path, r#"{"dims":[2],"amplitudes":[[1,0],[1,0]]}"#).unwrap();
    assert_eq!(qwl(&["witness", "coherence", "--d", "2", "--state", p]).status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(qwl(&["witness", "coherence", "--c", "1.5"]).status.code(), Some(2));
    assert_eq!(qwl(&["witness", "nope"]).status.code(), Some(2));
    assert_eq!(qwl(&["tables", "--id", "9"]).status.code(), Some(2));
    assert_eq!(qwl(&["lhv", "hardy", "--d", "1"]).status.code(), Some(2));
    assert_eq!(qwl(&["lhv", "hardy", "--d", "40"]).status.code(), Some(2));
    assert_eq!(qwl(&["stabilizer", "verify", "--d", "9", "--n", "5"]).status.code(), Some(2));
    assert_eq!(qwl(&["cv", "duan-simon", "--g", "-1"]).status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_qwl"))
        .args(["witness", "coherence"])
        .env("QWL_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_qwl"))
        .args(["witness", "coherence"])
        .env("QWL_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}
