use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_etajump")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--json", "-"];
    full.extend_from_slice(args);
    let out = run(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn jumps_of_diagonal_family() {
    let r = json(&["jumps", data("diag_t_t2_mt3.json").to_str().unwrap()]);
    let res = &r["result"]["report"];
    assert_eq!(res["profile"]["sigma"], serde_json::json!([1, 1, -1]));
    assert_eq!(res["jump_plus"], 1);
    assert_eq!(res["jump_minus"], 1);
    assert_eq!(res["oracle_agreement"], true);
    assert_eq!(r["ok"], true);
}

#[test]
fn circle_golden_case() {
    let r = json(&["circle", "--rank", "1", "--monodromy", "exp(2*pi*i*t)"]);
    let res = &r["result"];
    assert_eq!(res["profile"]["sigma"], serde_json::json!([1]));
    assert_eq!(res["jump_plus"], 1);
    assert_eq!(res["jump_minus"], -1);
}

#[test]
fn linkform_and_complex() {
    let r = json(&["linkform", data("block_form.json").to_str().unwrap()]);
    assert_eq!(r["result"]["route_agreement"], true);
    let r = json(&["complex", data("circle_complex.json").to_str().unwrap()]);
    assert_eq!(r["ok"], true);
}

#[test]
fn trefoil_jumps_agree() {
    let r = json(&["blanchfield", data("trefoil.json").to_str().unwrap()]);
    let roots = r["result"]["roots"].as_array().expect("roots");
    assert_eq!(roots.len(), 2);
    assert!(roots.iter().all(|c| c["agrees"] == true));
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "--count", "12", "--seed", "3"];
    let a = run(&[&["--json", "-"][..], &args].concat());
    let b = run(&[&["--json", "-"][..], &args].concat());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn input_errors_exit_with_two() {
    let out = run(&["circle", "--rank", "1", "--monodromy", "exp(2*pi*i*"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[Parse]"));
    let out = run(&["jumps", "/nonexistent.json"]);
    assert_eq!(out.status.code(), Some(2));
}
