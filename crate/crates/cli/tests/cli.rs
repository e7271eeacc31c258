use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

use kdec::document::TensorDocument;
use kdec::hermitian::make_space;
use kdec::maps::sigma;
use kdec::rational::int;
use kdec::spaces::{basis_affine, basis_bilinear_family, BilinearFamily};
use kdec::tensor::{Bilinear, Tensor4};
use kdec::witness::witness_w9;
use serde_json::Value;

fn kdec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kdec")).args(args).env_remove("KDEC_MAX_M").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_doc(dir: &Path, name: &str, a: &Tensor4) -> String {
    let path = dir.join(name);
    std::fs::write(&path, TensorDocument::from_tensor(a, BTreeMap::new()).to_json()).unwrap();
    path.to_str().unwrap().to_string()
}

fn run_decompose(dir: &Path, input: &str) -> (Output, Option<Value>) {
    let output = dir.join("out.json");
    let _ = std::fs::remove_file(&output);
    let out = kdec(&["decompose", "--input", input, "--output", output.to_str().unwrap()]);
    let json = std::fs::read_to_string(&output).ok().map(|t| serde_json::from_str(&t).unwrap());
    (out, json)
}

fn norms(report: &Value) -> BTreeMap<String, String> {
    report["components"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["label"].as_str().unwrap().to_string(), c["norm2"].as_str().unwrap().to_string()))
        .collect()
}

#[test]
fn dims_small_range() {
    let out = kdec(&["dims", "--n-min", "1", "--n-max", "2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("below theorem range (m < 4)"));
    assert!(text.contains("A              80"));
    assert!(text.contains("W11            0"));
    assert!(text.contains("W12            0"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn dims_range_violations() {
    assert_eq!(code(&kdec(&["dims", "--n-min", "0", "--n-max", "2"])), 2);
    assert_eq!(code(&kdec(&["dims", "--n-min", "3", "--n-max", "2"])), 2);
    assert_eq!(code(&kdec(&["dims", "--n-max", "5"])), 2);
    let capped = |cap: &str| {
        Command::new(env!("CARGO_BIN_EXE_kdec"))
            .args(["dims", "--n-min", "2", "--n-max", "2"])
            .env("KDEC_MAX_M", cap)
            .output()
            .unwrap()
    };
    assert_eq!(code(&capped("2")), 2);
    assert_eq!(code(&capped("4")), 0);
    assert_eq!(code(&capped("lots")), 2);
}

#[test]
fn verify_exit_codes() {
    assert_eq!(code(&kdec(&["verify", "all", "--n", "1"])), 2);
    assert_eq!(code(&kdec(&["verify", "lemma9.9"])), 2);
    assert_eq!(code(&kdec(&["verify", "lemma2.2", "--n", "x"])), 2);
    assert_eq!(code(&kdec(&["verify", "lemma2.2", "--n", "3", "--seed", "7"])), 0);
    assert_eq!(code(&kdec(&["verify", "section5", "--n", "3"])), 0);
}

#[test]
fn verify_json_is_deterministic() {
    let args = ["verify", "lemma4.1", "--n", "2", "--seed", "11", "--json"];
    let a = kdec(&args);
    let b = kdec(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let report: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report["passed"], Value::Bool(true));
    assert_eq!(report["suite"], "lemma4.1");
    assert!(report["properties"].as_array().unwrap().len() > 5);
}

#[test]
fn decompose_w9_witness() {
    let dir = tempfile::tempdir().unwrap();
    let a = witness_w9(&make_space(2).unwrap()).unwrap();
    let input = write_doc(dir.path(), "w9.json", &a);
    let (out, json) = run_decompose(dir.path(), &input);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json = json.unwrap();
    let n = norms(&json);
    assert_eq!(n.len(), 12);
    for (label, v) in &n {
        let want = if label == "W9" { "32/1" } else { "0/1" };
        assert_eq!(v, want, "{label}");
    }
    assert_eq!(json["residual"]["norm2"], "0/1");
    assert_eq!(json["tau"], "0/1");
    assert_eq!(json["rho"].as_array().unwrap().len(), 4);
    let first = std::fs::read(dir.path().join("out.json")).unwrap();
    run_decompose(dir.path(), &input);
    assert_eq!(first, std::fs::read(dir.path().join("out.json")).unwrap());
}

#[test]
fn decompose_zero_and_sigma2() {
    let dir = tempfile::tempdir().unwrap();
    let space = make_space(3).unwrap();
    let input = write_doc(dir.path(), "zero.json", &Tensor4::zeros(6));
    let (out, json) = run_decompose(dir.path(), &input);
    assert_eq!(code(&out), 0);
    assert!(norms(&json.unwrap()).values().all(|v| v == "0/1"));

    let s2m = basis_bilinear_family(&space, BilinearFamily::SymMinus);
    let coeffs: Vec<_> = (0..s2m.dim()).map(|i| int(i as i64 - 2)).collect();
    let phi: Bilinear = s2m.combine_element(&coeffs).unwrap();
    let input = write_doc(dir.path(), "s2.json", &sigma(2, &phi).unwrap());
    let (out, json) = run_decompose(dir.path(), &input);
    assert_eq!(code(&out), 0);
    let nonzero: Vec<String> = norms(&json.unwrap()).into_iter().filter(|(_, v)| v != "0/1").map(|(l, _)| l).collect();
    assert_eq!(nonzero, vec!["S2--via-rho".to_string()]);
}

#[test]
fn decompose_rejects_non_kaehler() {
    let dir = tempfile::tempdir().unwrap();
    let space = make_space(2).unwrap();
    let affine = basis_affine(&space);
    let a: Tensor4 = affine.element(0).unwrap();
    let input = write_doc(dir.path(), "bad.json", &a);
    let (out, json) = run_decompose(dir.path(), &input);
    assert_eq!(code(&out), 3);
    assert!(json.is_none());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("fails at (x,y,z,w)"), "{err}");
}

#[test]
fn decompose_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("junk", "not json"),
        ("dup", r#"{"m":4,"kind":"tensor4","entries":[[[0,1,0,1],"1/1"],[[0,1,0,1],"1/1"]],"metadata":{}}"#),
        ("range", r#"{"m":4,"kind":"tensor4","entries":[[[0,1,0,9],"1/1"]],"metadata":{}}"#),
        ("zeroden", r#"{"m":4,"kind":"tensor4","entries":[[[0,1,0,1],"1/0"]],"metadata":{}}"#),
        ("bilinear", r#"{"m":4,"kind":"bilinear","entries":[],"metadata":{}}"#),
        ("small", r#"{"m":2,"kind":"tensor4","entries":[],"metadata":{}}"#),
    ];
    for (name, text) in cases {
        let path = dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        let (out, _) = run_decompose(dir.path(), path.to_str().unwrap());
        assert_eq!(code(&out), 2, "{name}");
    }
    let (out, _) = run_decompose(dir.path(), dir.path().join("missing").to_str().unwrap());
    assert_eq!(code(&out), 2);
}

#[test]
fn witness_replays() {
    let out = kdec(&["witness", "5.1", "--n", "2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("[SKIP]"));
    assert!(text.contains("[PASS] 5.1 rho13(B1)(e2,e1) = 1/1"));
    assert_eq!(code(&kdec(&["witness", "5.3", "--n", "2"])), 2);
    assert_eq!(code(&kdec(&["witness", "6.1"])), 2);
    let out = kdec(&["witness", "5.2", "--n", "2", "--json"]);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let c2 = report["checks"].as_array().unwrap().iter().find(|c| c["name"] == "c2").unwrap();
    assert_eq!(c2["value"], "3/4");
}
