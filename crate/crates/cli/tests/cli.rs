use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_flowdiag"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn flowdiag")
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn fd_size(o: &Output) -> usize {
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix("fd_size "))
        .expect("fd_size line")
        .parse()
        .unwrap()
}

fn generate(dir: &TempDir, name: &str, m: &str, n: &str, k: &str, seed: &str) -> PathBuf {
    let out = path(dir, name);
    let o = run(&[
        "generate",
        "--m",
        m,
        "--n",
        n,
        "--k",
        k,
        "--seed",
        seed,
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn generate_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = generate(&dir, "a.json", "4", "4", "10", "1");
    let b = generate(&dir, "b.json", "4", "4", "10", "1");
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&fs::read(&a).unwrap()).unwrap();
    let seqs = v["sequences"].as_array().unwrap();
    assert_eq!(seqs.len(), 4);
    assert!(seqs
        .iter()
        .all(|s| s["states"].as_array().unwrap().len() == 4));
    assert_eq!(v["criteria"].as_array().unwrap().len(), 10);
}

#[test]
fn generate_rejects_small_ring() {
    let dir = TempDir::new().unwrap();
    let o = run(&["generate", "--k", "3", "--out", s(&path(&dir, "x.json"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn every_algorithm_builds_a_valid_diagram() {
    let dir = TempDir::new().unwrap();
    let ds = generate(&dir, "d.json", "3", "4", "6", "5");
    let mut sizes = Vec::new();
    for algo in [
        "exact",
        "reference",
        "frontier",
        "frontier-dep",
        "beam-seq",
        "beam-step",
    ] {
        let out = path(&dir, &format!("{algo}.json"));
        let o = run(&["build", "-d", s(&ds), "-a", algo, "-o", s(&out)]);
        assert!(
            o.status.success(),
            "{algo}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(stdout(&o).contains("cpu_seconds "));
        assert!(out.with_extension("dot").exists());
        sizes.push(fd_size(&o));
        let v = run(&["validate", "-d", s(&ds), "-g", s(&out)]);
        assert_eq!(v.status.code(), Some(0), "{algo}: {}", stdout(&v));
        assert_eq!(stdout(&v).trim(), "valid");
    }
    assert!(sizes[..4].iter().all(|&x| x == sizes[0]));
    assert!(sizes[4..].iter().all(|&x| x >= sizes[0]));
}

#[test]
fn exact_and_frontier_agree_on_two_sequences() {
    let dir = TempDir::new().unwrap();
    let ds = generate(&dir, "d.json", "2", "5", "5", "9");
    let a = run(&[
        "build",
        "-d",
        s(&ds),
        "-a",
        "exact",
        "-o",
        s(&path(&dir, "a.json")),
    ]);
    let b = run(&[
        "build",
        "-d",
        s(&ds),
        "-a",
        "frontier",
        "-o",
        s(&path(&dir, "b.json")),
        "--filter",
        "marking",
    ]);
    assert_eq!(fd_size(&a), fd_size(&b));
}

const TABLE_DATASET: &str = r#"{
  "sequences": [{"id": "x", "states": [{"labels": ["a"]}, {"labels": ["b"]}]}],
  "criteria": [{"id": "T", "name": "T", "kind": "table",
                "params": {"intervals": {"x": [[0, 2]]}, "matching": "exact"}}]
}"#;

#[test]
fn flag_mismatch_is_reported() {
    let dir = TempDir::new().unwrap();
    let ds = path(&dir, "t.json");
    fs::write(&ds, TABLE_DATASET).unwrap();
    let o = run(&[
        "build",
        "-d",
        s(&ds),
        "-a",
        "frontier",
        "-o",
        s(&path(&dir, "o.json")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("monotone"));
    let o = run(&[
        "build",
        "-d",
        s(&ds),
        "-a",
        "exact",
        "-o",
        s(&path(&dir, "o.json")),
    ]);
    assert!(o.status.success());
    assert_eq!(fd_size(&o), 3);
}

#[test]
fn validate_rejects_corruption_and_truncation() {
    let dir = TempDir::new().unwrap();
    let ds = generate(&dir, "d.json", "3", "4", "6", "2");
    let out = path(&dir, "o.json");
    assert!(
        run(&["build", "-d", s(&ds), "-a", "frontier", "-o", s(&out)])
            .status
            .success()
    );

    let mut v: serde_json::Value = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    let part = &mut v["certificates"][0]["parts"][0]["criterion"];
    *part = serde_json::Value::String(if part == "c0" { "c1" } else { "c0" }.into());
    let bad = path(&dir, "bad.json");
    fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    let o = run(&["validate", "-d", s(&ds), "-g", s(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("invalid:"));

    let text = fs::read_to_string(&out).unwrap();
    let cut = path(&dir, "cut.json");
    fs::write(&cut, &text[..text.len() / 2]).unwrap();
    let o = run(&["validate", "-d", s(&ds), "-g", s(&cut)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("parsing"));
}

#[test]
fn export_dot_is_stable() {
    let dir = TempDir::new().unwrap();
    let ds = generate(&dir, "d.json", "3", "4", "6", "4");
    let out = path(&dir, "o.json");
    assert!(run(&["build", "-d", s(&ds), "-a", "exact", "-o", s(&out)])
        .status
        .success());
    let a = run(&["export-dot", "-g", s(&out)]);
    let b = run(&["export-dot", "-g", s(&out)]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("digraph flow {"));
    assert_eq!(
        stdout(&a),
        fs::read_to_string(out.with_extension("dot")).unwrap()
    );
}

#[test]
fn bench_emits_raw_and_mean_rows() {
    let dir = TempDir::new().unwrap();
    let csv = path(&dir, "b.csv");
    let o = run(&[
        "bench",
        "--algos",
        "frontier,beam-step",
        "--trials",
        "3",
        "--shapes",
        "2:3:5,3:3:5",
        "--out",
        s(&csv),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 2 * 2 * (3 + 1));
    assert_eq!(lines.iter().filter(|l| l.starts_with("mean,")).count(), 4);
}

#[test]
fn budget_exhaustion_exits_with_three() {
    let dir = TempDir::new().unwrap();
    let ds = generate(&dir, "d.json", "4", "6", "6", "1");
    let o = run(&[
        "build",
        "-d",
        s(&ds),
        "-a",
        "exact",
        "-o",
        s(&path(&dir, "o.json")),
        "--time-limit",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["build"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
}
