//! End-to-end tests of the command-line binary.

use std::process::{Command, Output, Stdio};

use lprc::genbench::{gen_kcover_instance, KCoverSpec};
use lprc::instance::save_instance;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lprc"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn trivial_instance_file(dir: &tempfile::TempDir) -> std::path::PathBuf {
    // One bus (capacity 3), one unit line over a -> b -> c, one OD pair
    // a -> c with demand 2 and reward 1 per unit: Γ = 2.
    let json = serde_json::json!({
        "K": 1,
        "nodes": ["a", "b", "c"],
        "arcs": [
            {"id": "ab", "tail": "a", "head": "b"},
            {"id": "bc", "tail": "b", "head": "c"}
        ],
        "lines": [
            {"id": "dummy", "arcs": []},
            {"id": "l1", "arcs": ["ab", "bc"]}
        ],
        "buses": [
            {"id": "b1", "capacity": 3, "candidate_lines": ["dummy", "l1"]}
        ],
        "od_pairs": [
            {"origin": "a", "destination": "c", "demand": 2}
        ],
        "rewards": [
            {"bus": "b1", "line": "l1", "origin": "a", "destination": "c", "value": "1"}
        ],
        "costs": []
    });
    let path = dir.path().join("trivial.json");
    std::fs::write(&path, serde_json::to_vec_pretty(&json).unwrap()).unwrap();
    path
}

#[test]
fn validate_accepts_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let path = trivial_instance_file(&dir);
    let out = run(&["validate", path.to_str().unwrap()]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["valid"], true);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, b"{").unwrap();
    let out = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn relax_reports_gamma_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = trivial_instance_file(&dir);
    for mode in ["float", "exact"] {
        let out = run(&["relax", path.to_str().unwrap(), "--lp-mode", mode]);
        assert!(out.status.success());
        let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(doc["plan"]["gamma"], 2.0);
        assert_eq!(doc["meta"]["tool_version"], env!("CARGO_PKG_VERSION"));
    }
}

#[test]
fn round_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = trivial_instance_file(&dir);
    let args = ["round", path.to_str().unwrap(), "--algorithm", "nc", "--trials", "1", "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn oracle_limit_abort_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = trivial_instance_file(&dir);
    let ok = run(&["oracle", path.to_str().unwrap()]);
    assert!(ok.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(doc["opt_value"], 2.0);

    let aborted = run(&["oracle", path.to_str().unwrap(), "--max-assignments", "1"]);
    assert_eq!(aborted.status.code(), Some(2));
}

#[test]
fn gen_pipes_into_validate_via_stdin() {
    let gen = run(&["gen", "kcover", "--n", "4", "--sets", "1,2;3,4", "--k", "2"]);
    assert!(gen.status.success());

    let mut child = bin()
        .args(["validate", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child.stdin.as_mut().unwrap().write_all(&gen.stdout).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
}

#[test]
fn round_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_kcover_instance(&KCoverSpec {
        n: 4,
        family: vec![vec![1, 2], vec![3, 4]],
        k: 2,
    })
    .unwrap();
    let path = dir.path().join("kc.json");
    std::fs::write(&path, save_instance(&inst)).unwrap();
    let csv_path = dir.path().join("trials.csv");
    let out = run(&[
        "round",
        path.to_str().unwrap(),
        "--algorithm",
        "nc",
        "--trials",
        "5",
        "--seed",
        "3",
        "--budget-audit",
        "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("seed,reward,discarded,usage_1"));
    assert_eq!(csv.lines().count(), 6);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["budget_audit"]["max_usage"].is_array());
}

#[test]
fn bench_emits_rows() {
    let out = run(&["bench", "--suite", "kcover", "--instances", "2", "--trials", "20", "--seed", "5"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for row in rows {
        assert!(row["gamma"].is_number());
        assert!(row["mean"].is_number());
        assert!(row["bound"].is_number());
    }
}
