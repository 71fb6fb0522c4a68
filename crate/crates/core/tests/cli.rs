use std::path::PathBuf;
use std::process::{Command, Output};

use genus_core::cli::GenusJson;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn genus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genus")).args(args).output().expect("binary runs")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = genus(args);
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn path(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

#[test]
fn that_trivial() {
    let (code, out, _) = run(&["that", &path("trivial.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("t̂ = 1, k = 0"), "{out}");
}

#[test]
fn that_seventy_two() {
    let (code, out, _) = run(&["that", &path("that72.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("t(X) = 2") && out.contains("t(Y) = 3"), "{out}");
    assert!(out.contains("t̂ = 72"), "{out}");
}

#[test]
fn that_bad_shape_cites_degree() {
    let (code, _, err) = run(&["that", &path("malformed/bad_shape.json")]);
    assert_eq!(code, 2);
    assert!(err.contains("degree 3"), "{err}");
}

fn genus_json(name: &str) -> GenusJson {
    let (code, out, err) = run(&["genus", &path(name), "--json"]);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn genus_fixture_values() {
    assert_eq!(genus_json("fifteen.json").genus_group, vec![4]);
    assert_eq!(genus_json("fifteen_image2.json").genus_group, Vec::<u64>::new());
    assert_eq!(genus_json("small_t.json").genus_group, Vec::<u64>::new());
    assert_eq!(genus_json("trivial.json").genus_group, Vec::<u64>::new());
}

#[test]
fn genus_json_keys() {
    let (_, out, _) = run(&["genus", &path("that72.json"), "--json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys.len(), 4);
    for k in ["t_hat", "k", "upper_bound", "genus_group"] {
        assert!(v.get(k).is_some(), "missing {k}");
    }
}

#[test]
fn genus_human_output() {
    let (code, out, _) = run(&["genus", &path("fifteen.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("genus group: Z/4"), "{out}");
    assert!(out.contains("upper bound"), "{out}");
}

#[test]
fn verify_claim_catalog_passes() {
    let (code, out, _) = run(&["verify-claim", &path("catalog.json")]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("200 trials, 200 passed, 0 failed"), "{out}");
}

#[test]
fn verify_claim_trivial_modulus() {
    let (code, out, _) = run(&["verify-claim", &path("small_t.json"), "--trials", "30", "--seed", "5"]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn verify_claim_reports_obstruction() {
    let (code, out, _) = run(&["verify-claim", &path("rank_deficient.json"), "--trials", "40"]);
    assert_eq!(code, 1);
    assert!(out.contains("not ±1"), "{out}");
}

#[test]
fn verify_claim_bad_seed() {
    let (code, _, err) = run(&["verify-claim", &path("fifteen.json"), "--seed", "-x"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn oracle_diff_agreement() {
    let (code, out, _) = run(&["oracle-diff", &path("fifteen.json")]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("agree") && !out.contains("DISAGREE"));
    let (code, out, _) = run(&["oracle-diff", &path("zero_matrix.json")]);
    assert_eq!(code, 0, "{out}");
    // full (ℤ*_5)² has 16 elements
    assert!(out.lines().any(|l| l.starts_with('2') && l.contains("general") && l.contains("16")), "{out}");
}

#[test]
fn oracle_diff_guard() {
    let (code, _, err) = run(&["oracle-diff", &path("catalog.json"), "--bound", "60"]);
    assert_eq!(code, 2);
    assert!(err.contains("guard"), "{err}");
}

#[test]
fn unknown_command_and_help() {
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}
