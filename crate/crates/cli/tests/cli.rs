use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use opalg::examples::{e, ex1_generators};
use opalg::io::{parse_algebra, write_algebra};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_opalg"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn opalg")
}

fn analyze(path: &Path) -> (Output, Value) {
    let out = run(&["analyze", path.to_str().unwrap()]);
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out, v)
}

#[test]
fn shipped_ex1_matches_generators() {
    let (n, mats) = parse_algebra(&std::fs::read_to_string(data("ex1.json")).unwrap()).unwrap();
    let (u, v) = ex1_generators();
    assert_eq!(n, 4);
    assert_eq!(mats, vec![u.clone(), v.clone(), &u * &v]);
}

#[test]
fn analyze_ex1() {
    let (out, r) = analyze(&data("ex1.json"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(r["dim"], 3);
    assert_eq!(r["verdicts"]["reversible"], "YES");
    assert_eq!(r["verdicts"]["symmetric"], "FEASIBLE");
    assert_eq!(r["verdicts"]["triangularizable"], true);
    assert_eq!(r["predicates"]["commutative"], false);
    assert_eq!(r["predicates"]["anticommuting"], true);
    assert_eq!(r["predicates"]["three_commutative"], true);
    assert_eq!(r["tolerances"]["eq_tol"], 1e-9);
}

#[test]
fn analyze_strict_upper_3() {
    let (out, r) = analyze(&data("strict_upper_3.json"));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(r["verdicts"]["reversible"], "NO");
    assert_eq!(r["predicates"]["three_commutative"], true);
}

#[test]
fn analyze_diag_3() {
    let (out, r) = analyze(&data("diag_3.json"));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(r["predicates"]["commutative"], true);
    assert_eq!(r["verdicts"]["reversible"], "YES");
    assert_eq!(r["predicates"]["radical_dim"], 0);
}

#[test]
fn analyze_is_deterministic_and_honours_skips() {
    let p = data("ex1.json");
    let a = run(&["analyze", p.to_str().unwrap(), "--skip", "sdp", "--skip", "triangularize"]);
    let b = run(&["analyze", p.to_str().unwrap(), "--skip", "sdp", "--skip", "triangularize"]);
    assert_eq!(a.status.code(), Some(0));
    let (ra, rb): (Value, Value) = (
        serde_json::from_slice(&a.stdout).unwrap(),
        serde_json::from_slice(&b.stdout).unwrap(),
    );
    assert!(ra["verdicts"]["symmetric"].is_null());
    assert!(ra["verdicts"]["triangularizable"].is_null());
    assert_eq!(ra["verdicts"], rb["verdicts"]);
    assert_eq!(ra["z"], rb["z"]);
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"ambient\": 2, \"matrices\": [[[1,0]]]}").unwrap();
    assert_eq!(analyze(&bad).0.status.code(), Some(2));
    std::fs::write(&bad, "not json").unwrap();
    assert_eq!(analyze(&bad).0.status.code(), Some(2));
    assert_eq!(analyze(&dir.path().join("missing.json")).0.status.code(), Some(2));
    let out = run(&["analyze", data("ex1.json").to_str().unwrap(), "--tol", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_algebra_exits_3_with_pair() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("pair.json");
    // e12 and e21 span no algebra: e12·e21 = e11.
    std::fs::write(&p, write_algebra(2, &[e(2, 1, 2), e(2, 2, 1)])).unwrap();
    let (out, _) = analyze(&p);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("not closed") || err.contains("algebra"), "{err}");
}

#[test]
fn search_zero_trials() {
    let out = run(&["search", "--ambient", "3", "--trials", "0", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let s: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(s["histogram"], serde_json::json!({}));
    assert_eq!(s["hits"], serde_json::json!([]));
}

#[test]
fn search_with_ex1_hits() {
    let out = run(&["search", "--ambient", "4", "--trials", "20", "--seed", "3", "--include-ex1"]);
    assert_eq!(out.status.code(), Some(0));
    let s: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(s["noncommutative_reversible"].as_u64().unwrap() >= 1);
    assert_eq!(s["samples"], 21);
}

#[test]
fn search_rejects_other_ambients() {
    assert_eq!(run(&["search", "--ambient", "5", "--trials", "1"]).status.code(), Some(2));
}

#[test]
fn reproduce_recta_only() {
    let out = run(&["reproduce", "--only", "recta"]);
    assert_eq!(out.status.code(), Some(0));
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.contains("recta"));
    assert!(!table.contains("kegs"));
    assert_eq!(run(&["reproduce", "--only", "nonsense"]).status.code(), Some(2));
}
