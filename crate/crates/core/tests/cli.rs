use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn joinconv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_joinconv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

const THREE_WAY: &str = r#"{
  "n": 3,
  "relations": ["R1", "R2", "R3"],
  "edges": [[0, 1], [0, 2], [1, 2]],
  "cross_products": true,
  "cardinalities": [
    {"set": [0], "value": 1}, {"set": [1], "value": 1}, {"set": [2], "value": 1},
    {"set": [0, 1], "value": 10}, {"set": [0, 2], "value": 20},
    {"set": [1, 2], "value": 5}, {"set": [0, 1, 2], "value": 8}
  ]
}"#;

fn optimize(dir: &TempDir, algo: &str, extra: &[&str]) -> Value {
    let input = dir.path().join("q.json");
    std::fs::write(&input, THREE_WAY).unwrap();
    let mut args = vec!["optimize", "--algo", algo, "--input", path_str(&input)];
    args.extend_from_slice(extra);
    let out = joinconv(&args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn optimize_three_way() {
    let dir = TempDir::new().unwrap();
    let out = optimize(&dir, "dpsub-out", &[]);
    assert_eq!(out["algorithm"], "dpsub-out");
    assert_eq!(out["cost"], 13);
    assert!(out["join_tree"].is_array());
    assert!(out["stats"]["splits"].is_u64());

    let max = optimize(&dir, "dpconv-max", &[]);
    assert_eq!(max["cost"], 8);
    let ccap = optimize(&dir, "ccap-fast", &[]);
    assert_eq!(ccap["gamma"], 8);
    assert_eq!(ccap["cost"], 13);
}

#[test]
fn optimize_writes_file_and_reports_infeasible_cap() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("q.json");
    let result = dir.path().join("r.json");
    std::fs::write(&input, THREE_WAY).unwrap();
    let out = joinconv(&[
        "optimize",
        "--algo",
        "dpsub-out",
        "--input",
        path_str(&input),
        "--cap",
        "7",
        "--out",
        path_str(&result),
    ]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&result).unwrap()).unwrap();
    assert!(v["cost"].is_null());
    assert!(v["join_tree"].is_null());
}

#[test]
fn user_errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("bad.json");
    std::fs::write(&input, r#"{"n": 2}"#).unwrap();
    let out = joinconv(&[
        "optimize",
        "--algo",
        "dpsub-max",
        "--input",
        path_str(&input),
    ]);
    assert_eq!(out.status.code(), Some(1));

    let missing = dir.path().join("missing.json");
    let out = joinconv(&[
        "optimize",
        "--algo",
        "dpsub-max",
        "--input",
        path_str(&missing),
    ]);
    assert_eq!(out.status.code(), Some(1));

    std::fs::write(&input, THREE_WAY).unwrap();
    let out = joinconv(&[
        "optimize",
        "--algo",
        "dpconv-max",
        "--input",
        path_str(&input),
        "--cap",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn generate_then_optimize() {
    let dir = TempDir::new().unwrap();
    let q = dir.path().join("gen.json");
    let out = joinconv(&[
        "generate",
        "--n",
        "6",
        "--seed",
        "3",
        "--max-card",
        "50",
        "--out",
        path_str(&q),
    ]);
    assert!(out.status.success());
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&q).unwrap()).unwrap();
    assert_eq!(file["n"], 6);
    assert_eq!(file["cardinalities"].as_array().unwrap().len(), 63);

    let again = dir.path().join("gen2.json");
    joinconv(&[
        "generate",
        "--n",
        "6",
        "--seed",
        "3",
        "--max-card",
        "50",
        "--out",
        path_str(&again),
    ]);
    assert_eq!(std::fs::read(&q).unwrap(), std::fs::read(&again).unwrap());

    let out = joinconv(&["optimize", "--algo", "dpconv-out", "--input", path_str(&q)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let fast: Value = serde_json::from_slice(&out.stdout).unwrap();
    let out = joinconv(&["optimize", "--algo", "dpsub-out", "--input", path_str(&q)]);
    let slow: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(fast["cost"], slow["cost"]);

    // default cardinalities are far beyond the embedding's exponent budget
    let big = dir.path().join("big.json");
    joinconv(&[
        "generate",
        "--n",
        "6",
        "--seed",
        "3",
        "--out",
        path_str(&big),
    ]);
    let out = joinconv(&[
        "optimize",
        "--algo",
        "dpconv-out",
        "--input",
        path_str(&big),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bench_writes_csv() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("b.csv");
    let out = joinconv(&[
        "bench",
        "--algos",
        "dpsub-max,dpconv-max",
        "--sizes",
        "4..5",
        "--reps",
        "2",
        "--seed",
        "1",
        "--csv",
        path_str(&csv),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("n,rep,algorithm,cost_value,elapsed_ns,splits_enumerated,ring_multiplications")
    );
    assert_eq!(lines.count(), 8);
    assert!(String::from_utf8_lossy(&out.stdout).contains("mean_ms"));
}

#[test]
fn bench_rejects_bad_sizes() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("b.csv");
    let out = joinconv(&[
        "bench",
        "--algos",
        "dpsub-max",
        "--sizes",
        "9..4",
        "--csv",
        path_str(&csv),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn ops_table_prints_rows() {
    let out = joinconv(&["ops-table", "--n", "40", "--eps", "1e-2,1e-3"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].ends_with("true"));
    assert!(rows[1].ends_with("false"));
    assert!(text.contains("12157665459056928801"));

    let out = joinconv(&["ops-table", "--n", "40", "--eps", "0"]);
    assert!(!out.status.success());
}
