use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::Value;
use specnorm::{read_matrix_market, write_matrix_market};
use specnorm_core::Matrix;

fn specnorm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specnorm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn identity_mm(d: usize) -> String {
    let mut s = format!("%%MatrixMarket matrix coordinate real general\n{d} {d} {d}\n");
    for i in 1..=d {
        s.push_str(&format!("{i} {i} 1.0\n"));
    }
    s
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON object")
}

#[test]
fn identity_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "id.mtx", &identity_mm(10));
    let v = json(&specnorm(&["estimate", &path, "--eps", "0.1", "--delta", "0.1", "--seed", "7"]));
    assert_eq!(v["estimate_sq"], 1.0);
    assert_eq!(v["estimate"], 1.0);
    assert_eq!(v["effective_rank"], 10.0);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["eps"], 0.1);
    assert_eq!(v["delta"], 0.1);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    let mut want = vec![
        "estimate_sq",
        "estimate",
        "effective_rank",
        "method_used",
        "r_used",
        "iterations_used",
        "eps",
        "delta",
        "seed",
        "wall_time_ms",
    ];
    let mut keys_sorted = keys.clone();
    keys_sorted.sort_unstable();
    want.sort_unstable();
    assert_eq!(keys_sorted, want);
}

#[test]
fn exact_method_on_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "a.csv", "1,2\n3,4\n");
    let v = json(&specnorm(&["estimate", &path, "--method", "exact", "--seed", "1"]));
    let got = v["estimate_sq"].as_f64().unwrap();
    assert!((got - 29.866_068_747_318_5).abs() < 1e-9);
    assert_eq!(v["method_used"], "exact");
}

#[test]
fn explicit_format_and_plain_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "a.txt", "3,0\n0,4\n");
    let out = specnorm(&[
        "estimate", &path, "--format", "dense-csv", "--method", "exact", "--output", "plain", "--seed", "2",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("estimate 4\nestimate_sq 16\n"), "{text}");
}

#[test]
fn symmetric_market_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "s.mtx",
        "%%MatrixMarket matrix coordinate real symmetric\n2 2 3\n1 1 2\n2 1 1\n2 2 2\n",
    );
    // [[2,1],[1,2]] has eigenvalues 3 and 1
    let v = json(&specnorm(&["estimate", &path, "--method", "exact", "--seed", "0"]));
    assert!((v["estimate_sq"].as_f64().unwrap() - 9.0).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "id.mtx", &identity_mm(3));
    let bad = write(dir.path(), "bad.mtx", "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 q 1\n");
    let complex = write(dir.path(), "c.mtx", "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n");
    let missing = dir.path().join("missing.mtx");

    let code = |args: &[&str]| specnorm(args).status.code().unwrap();
    assert_eq!(code(&["estimate", &bad]), 2);
    assert_eq!(code(&["estimate", &complex]), 2);
    assert_eq!(code(&["estimate", missing.to_str().unwrap()]), 2);
    assert_eq!(code(&["estimate", &good, "--eps", "1.5"]), 3);
    assert_eq!(code(&["estimate", &good, "--delta", "0"]), 3);
    assert_eq!(code(&["estimate", &good, "--method", "lanczos"]), 3);
    assert_eq!(code(&["estimate", &good, "--eps", "abc"]), 3);
    assert_eq!(code(&["estimate", &good, "--seed", "1"]), 0);

    let out = specnorm(&["estimate", &bad]);
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn oracle_cap_is_a_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "big.mtx", &identity_mm(600));
    assert_eq!(specnorm(&["estimate", &path, "--method", "exact"]).status.code(), Some(4));
    assert_eq!(specnorm(&["estimate", &path, "--method", "direct"]).status.code(), Some(0));
}

#[test]
fn zero_matrix_reports_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "z.mtx", "%%MatrixMarket matrix coordinate real general\n3 2 0\n");
    let v = json(&specnorm(&["estimate", &path, "--seed", "5"]));
    assert_eq!(v["estimate_sq"], 0.0);
    assert_eq!(v["effective_rank"], 0.0);
}

#[test]
fn harness_subcommand() {
    let out = specnorm(&["harness", "--experiment", "lemma3", "--trials", "10000", "--seed", "3"]);
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["results"].as_array().unwrap().len(), 6);
    // below the experiment minimum
    let out = specnorm(&["harness", "--experiment", "lemma3", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(3));
}

fn sparse_matrix() -> impl Strategy<Value = Matrix> {
    (1usize..12, 1usize..12).prop_flat_map(|(n, d)| {
        prop::collection::vec((0..n, 0..d, prop_oneof![-1e300f64..1e300, -1e-300f64..1e-300, -100.0f64..100.0]), 0..40)
            .prop_map(move |t| Matrix::from_triplets(n, d, t).unwrap())
    })
}

proptest! {
    #[test]
    fn market_round_trip(m in sparse_matrix()) {
        let mut buf = Vec::new();
        write_matrix_market(&m, &mut buf).unwrap();
        let back = read_matrix_market(buf.as_slice()).unwrap();
        prop_assert_eq!(back, m);
    }
}
