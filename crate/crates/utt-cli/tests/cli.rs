//! Exit codes and output formats of the command-line driver.

use assert_cmd::Command;
use predicates::prelude::*;

fn utt() -> Command {
    Command::cargo_bin("utt").unwrap()
}

fn corpus(name: &str) -> String {
    format!("{}/../../corpus/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn check_complete_file_exits_zero() {
    utt()
        .args(["check", &corpus("plus.utt")])
        .assert()
        .success()
        .stdout("ok\n");
}

#[test]
fn check_with_holes_lists_goals() {
    utt()
        .args(["check", &corpus("left-unit-hole2.utt")])
        .assert()
        .success()
        .stdout(predicate::str::starts_with("1 goal\n"))
        .stdout(predicate::str::contains("? 0 : ").not())
        .stdout(predicate::str::contains("?0 : (x0 : Nat) -> Id Nat x0 x0"));
}

#[test]
fn check_type_error_exits_one() {
    utt()
        .args(["check", &corpus("zero-plus-stuck.utt")])
        .assert()
        .code(1)
        .stderr(predicate::str::contains("error[conv-mismatch]"))
        .stderr(predicate::str::contains("found:    out["));
}

#[test]
fn missing_file_exits_two() {
    utt()
        .args(["check", &corpus("missing.utt")])
        .assert()
        .code(2);
}

#[test]
fn usage_error_exits_two() {
    utt().args(["frobnicate"]).assert().code(2);
}

#[test]
fn elaborate_matches_golden_and_is_deterministic() {
    let golden = std::fs::read_to_string(corpus("golden/plus.sig.golden")).unwrap();
    let out1 = utt()
        .args(["elaborate", &corpus("plus.utt")])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let out2 = utt()
        .args(["elaborate", &corpus("plus.utt")])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    assert_eq!(out1, out2);
    assert_eq!(String::from_utf8(out1).unwrap(), golden);
}

#[test]
fn normalize_with_assumptions_computes() {
    utt()
        .args([
            "normalize",
            &corpus("two.utt"),
            "--def",
            "two",
            "--assume",
            "two",
            "--assume",
            "(+)",
        ])
        .assert()
        .success()
        .stdout("2\n");
}

#[test]
fn normalize_without_assumptions_stays_sealed() {
    utt()
        .args(["normalize", &corpus("two.utt"), "--def", "two"])
        .assert()
        .success()
        .stdout("out[two] two\n");
}

#[test]
fn normalize_unknown_prop_exits_one() {
    utt()
        .args([
            "normalize",
            &corpus("two.utt"),
            "--def",
            "two",
            "--assume",
            "nope",
        ])
        .assert()
        .code(1)
        .stderr(predicate::str::contains("unknown proposition"));
}

#[test]
fn normalize_hidden_prop_rejected() {
    utt()
        .args([
            "normalize",
            &corpus("abstract.utt"),
            "--def",
            "secret",
            "--assume",
            "%abs.0",
        ])
        .assert()
        .code(1)
        .stderr(predicate::str::contains("abstract"));
}

#[test]
fn goals_shows_simplification() {
    utt()
        .args(["goals", &corpus("left-unit-hole1.utt")])
        .assert()
        .success()
        .stdout(predicate::str::contains("out["));
    utt()
        .args(["goals", &corpus("left-unit-hole2.utt")])
        .assert()
        .success()
        .stdout(predicate::str::contains("out[").not());
}

#[test]
fn raw_goals_keeps_sealed_form() {
    utt()
        .args(["goals", &corpus("left-unit-hole2.utt"), "--raw-goals"])
        .assert()
        .success()
        .stdout(predicate::str::contains("out["));
}

#[test]
fn max_goal_depth_elides() {
    utt()
        .args([
            "goals",
            &corpus("left-unit-hole1.utt"),
            "--max-goal-depth",
            "2",
        ])
        .assert()
        .success()
        .stdout(predicate::str::contains("…"));
}

#[test]
fn abstract_unfold_diagnostic() {
    utt()
        .args(["check", &corpus("abstract-bad.utt")])
        .assert()
        .code(1)
        .stderr(predicate::str::contains("error[abstract-unfold-target]"))
        .stderr(predicate::str::contains("secret"));
}

#[test]
fn parse_error_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.utt");
    std::fs::write(&path, "unfolds def x : Nat := ze\n").unwrap();
    utt()
        .args(["check", path.to_str().unwrap()])
        .assert()
        .code(1)
        .stderr(predicate::str::contains("error[parse]"));
}
