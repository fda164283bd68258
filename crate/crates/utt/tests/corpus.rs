//! End-to-end elaboration of the example corpus, with kernel re-checking
//! of every produced signature.

use utt::check::check_signature;
use utt::elab::{elaborate, Elaborator};
use utt::error::ElabError;
use utt::pretty::Printer;
use utt::surface::parse_program;

fn corpus_path(name: &str) -> String {
    format!("{}/../../corpus/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn elaborate_file(name: &str) -> Result<Elaborator, ElabError> {
    let src = std::fs::read_to_string(corpus_path(name)).unwrap();
    let prog = parse_program(&src).unwrap();
    let el = elaborate(&prog)?;
    // the kernel must accept everything the elaborator produced
    check_signature(&el.signature).expect("elaborated signature re-checks");
    Ok(el)
}

#[test]
fn plus_elaborates() {
    let el = elaborate_file("plus.utt").unwrap();
    assert!(el.goals.is_empty());
    let printed = Printer::new(&el.table).signature(&el.signature);
    insta_like(&printed, "plus.sig.golden");
}

/// Compare against a golden file, writing it when absent.
fn insta_like(actual: &str, golden: &str) {
    let path = corpus_path(&format!("golden/{golden}"));
    match std::fs::read_to_string(&path) {
        Ok(expected) => assert_eq!(actual, expected, "golden mismatch for {golden}"),
        Err(_) => {
            std::fs::write(&path, actual).unwrap();
            panic!("golden file {golden} was missing; wrote it, rerun");
        }
    }
}

#[test]
fn zero_plus_checks_with_unfolds() {
    let el = elaborate_file("zero-plus.utt").unwrap();
    assert!(el.goals.is_empty());
}

#[test]
fn zero_plus_stuck_without_unfolds() {
    let err = elaborate_file("zero-plus-stuck.utt").unwrap_err();
    match err {
        ElabError::ConvMismatch { found, .. } => {
            assert!(found.contains("out["), "found side shows the sealed form: {found}");
        }
        other => panic!("expected a conversion mismatch, got {other}"),
    }
}

#[test]
fn abbreviation_checks() {
    let el = elaborate_file("abbreviation.utt").unwrap();
    assert!(el.goals.is_empty());
}

#[test]
fn left_unit_both_styles_check() {
    assert!(elaborate_file("left-unit.utt").unwrap().goals.is_empty());
    assert!(elaborate_file("left-unit-unfold-in.utt")
        .unwrap()
        .goals
        .is_empty());
}

#[test]
fn hole_progression() {
    // sealed goal
    let el1 = elaborate_file("left-unit-hole1.utt").unwrap();
    assert_eq!(el1.goals.len(), 1);
    let g1 = Printer::new(&el1.table).term(&[], &el1.goals[0].ty);
    insta_like(&g1, "hole1.goal.golden");
    assert!(g1.contains("out["));

    // unfolds on the definition simplifies the goal
    let el2 = elaborate_file("left-unit-hole2.utt").unwrap();
    assert_eq!(el2.goals.len(), 1);
    let g2 = Printer::new(&el2.table).term(&[], &el2.goals[0].ty);
    insta_like(&g2, "hole2.goal.golden");
    assert!(!g2.contains("out["));

    // a local unfold simplifies the goal as well
    let el3 = elaborate_file("left-unit-hole3.utt").unwrap();
    assert_eq!(el3.goals.len(), 1);
    let names: Vec<String> = el3.goals[0]
        .tele
        .entries()
        .iter()
        .filter_map(|e| match e {
            utt::term::TeleEntry::TermVar { name, .. } => Some(name.clone()),
            _ => None,
        })
        .collect();
    let g3 = Printer::new(&el3.table).term(&names, &el3.goals[0].ty);
    insta_like(&g3, "hole3.goal.golden");
    assert!(!g3.contains("out["));
}

#[test]
fn two_thm_thm_is_refl() {
    let el = elaborate_file("two.utt").unwrap();
    assert!(el.goals.is_empty());
}

#[test]
fn plus_zero_laws() {
    let el = elaborate_file("plus-zero.utt").unwrap();
    assert!(el.goals.is_empty());
}

#[test]
fn abstract_checks_and_hides() {
    let el = elaborate_file("abstract.utt").unwrap();
    assert!(el.goals.is_empty());
    assert!(el.prop_of_def("secret").is_none());
}

#[test]
fn abstract_unfold_rejected() {
    let err = elaborate_file("abstract-bad.utt").unwrap_err();
    assert!(matches!(err, ElabError::AbstractUnfoldTarget { .. }));
}
