use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rrlab(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rrlab")).args(args).env("RRLAB_CACHE_DIR", cache).output().expect("binary runs")
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).expect("json line")).collect()
}

#[test]
fn catalog_lists_groups() {
    let dir = tempfile::tempdir().unwrap();
    let out = rrlab(&["catalog"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("wreath(c2,z)"));
    assert!(text.contains("graph_product"));
}

#[test]
fn lamplighter_scan_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["scan", "--group", "wreath(c2,z)", "--max-length", "9", "--c", "8"];
    let first = rrlab(&args, dir.path());
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    let recs = records(&first);
    let summary = recs.last().unwrap();
    assert_eq!(summary["record"], "summary");
    assert_eq!(summary["in_set"]["elements"], serde_json::json!([2, 8]));
    let rows: Vec<&Value> = recs.iter().filter(|r| r["record"] == "row").collect();
    assert_eq!(rows.len(), 9);
    // Second run reads the cached ball.
    let second = rrlab(&args, dir.path());
    assert_eq!(first.stdout, second.stdout);
    let uncached = rrlab(&[&args[..], &["--no-cache"]].concat(), dir.path());
    assert_eq!(first.stdout, uncached.stdout);
}

#[test]
fn unknown_rows_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = rrlab(&["scan", "--group", "zd(2)", "--max-length", "7", "--exhaustive-up-to", "5", "--format", "table"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Unknown"));
}

#[test]
fn bad_group_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = rrlab(&["scan", "--group", "nosuch(3)", "--max-length", "4"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown group spec"));
}

#[test]
fn witness_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("w2.json");
    let f = file.to_str().unwrap();
    let gen = rrlab(&["witness", "gen", "--method", "wreath", "--group", "wreath(c2,z)", "--n", "2", "--out", f], dir.path());
    assert!(gen.status.success(), "{}", String::from_utf8_lossy(&gen.stderr));
    let ok = rrlab(&["witness", "verify", "--file", f, "--mode", "exhaustive"], dir.path());
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(records(&ok)[0]["verdict"], "valid");

    // [txT, x] is a relation of Γ₁, so it cannot be new in the quotient.
    let text = fs::read_to_string(&file).unwrap();
    let mut cert: Value = serde_json::from_str(&text).unwrap();
    cert["word"] = Value::from("txTxtXTX");
    let bad = dir.path().join("bad.json");
    fs::write(&bad, serde_json::to_string_pretty(&cert).unwrap()).unwrap();
    let out = rrlab(&["witness", "verify", "--file", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(records(&out)[0]["verdict"], "invalid");

    let trunc = dir.path().join("trunc.json");
    fs::write(&trunc, &text[..text.len() / 2]).unwrap();
    let out = rrlab(&["witness", "verify", "--file", trunc.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));
}

#[test]
fn sampled_verification_is_supported() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("w1.json");
    let f = file.to_str().unwrap();
    assert!(rrlab(&["witness", "gen", "--method", "wreath", "--group", "wreath(z,z)", "--n", "3", "--out", f], dir.path()).status.success());
    let out = rrlab(&["witness", "verify", "--file", f, "--mode", "sampled", "--samples", "50", "--seed", "4"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(records(&out)[0]["label"], "supported");
}

#[test]
fn greendlinger_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.json");
    let f = file.to_str().unwrap();
    let spec = "sc(family=21:63;gens=3;seed=1)";
    let gen = rrlab(&["witness", "gen", "--method", "greendlinger", "--group", spec, "--n", "63", "--out", f], dir.path());
    assert!(gen.status.success(), "{}", String::from_utf8_lossy(&gen.stderr));
    let out = rrlab(&["witness", "verify", "--file", f], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let missing = rrlab(&["witness", "gen", "--method", "greendlinger", "--group", spec, "--n", "30", "--out", f], dir.path());
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn graph_phi_of_a_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("c5.txt");
    fs::write(&edges, "# pentagon\n0 1\n1 2\n2 3\n3 4\n4 0\n").unwrap();
    let out = rrlab(&["graph-phi", "--edges", edges.to_str().unwrap(), "--max-n", "8"], dir.path());
    assert!(out.status.success());
    let ins: Vec<u64> = records(&out).iter().filter(|r| r["verdict"] == "in").map(|r| r["n"].as_u64().unwrap()).collect();
    assert_eq!(ins, vec![5]);
}

#[test]
fn sets_classify_and_compare() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    let arith: String = (1..=99).map(|k| format!("{}\n", 4 * k + 4)).collect();
    fs::write(&a, format!("window 400\n{arith}")).unwrap();
    fs::write(&b, "window 400\n8\n16\n32\n64\n128\n256\n").unwrap();
    let (a, b) = (a.to_str().unwrap(), b.to_str().unwrap());
    let out = rrlab(&["sets", "classify", "--file", a, "--c", "2", "--window", "8..200"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(records(&out)[0]["kind"], "Dense");
    let out = rrlab(&["sets", "compare", "--a", a, "--b", b, "--c", "2", "--window", "8..100"], dir.path());
    assert!(out.status.success());
    let r = &records(&out)[0];
    assert_eq!(r["a_preceq_b"]["holds"], true);
    assert_eq!(r["b_preceq_a"]["holds"], true);
}

#[test]
fn grigorchuk_chain() {
    let dir = tempfile::tempdir().unwrap();
    let out = rrlab(&["grig", "kchain", "--max-depth", "1"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let recs = records(&out);
    assert_eq!(recs[0]["word"], "adadadad");
    assert_eq!(recs.len(), 2);
}
