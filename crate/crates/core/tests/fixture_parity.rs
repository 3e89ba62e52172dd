//! The shipped fixture files must parse, validate, and agree with the
//! in-code constructors bit for bit (they are generated from them; see
//! `examples/gen_fixtures.rs`).

use ifs_measures::filterbank::{daubechies4_bank, fourier_basis_bank, monomial_bank, FilterBank};
use ifs_measures::hutchinson::{cantor_ifs, dyadic_ifs};
use ifs_measures::io::{bank_from_json, ifs_from_json, vector_from_json};
use ifs_measures::CoeffVector;
use std::path::PathBuf;

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn bank_fixtures_match_constructors() {
    let cases: Vec<(&str, FilterBank)> = vec![
        ("shift_bank.json", monomial_bank(2).unwrap()),
        ("haar_bank.json", fourier_basis_bank(2).unwrap()),
        ("fourier3_bank.json", fourier_basis_bank(3).unwrap()),
        ("fourier4_bank.json", fourier_basis_bank(4).unwrap()),
        ("monomial3_bank.json", monomial_bank(3).unwrap()),
        ("d4_bank.json", daubechies4_bank()),
    ];
    for (name, expected) in cases {
        let parsed = bank_from_json(&fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(parsed, expected, "{name} drifted from its constructor");
    }
}

#[test]
fn bank_fixtures_validate() {
    for name in [
        "shift_bank.json",
        "haar_bank.json",
        "fourier3_bank.json",
        "fourier4_bank.json",
        "monomial3_bank.json",
        "d4_bank.json",
    ] {
        let fb = bank_from_json(&fixture(name)).unwrap();
        let report = fb.validate_default().unwrap();
        assert!(report.passed, "{name}: defect {:e}", report.max_defect);
    }
}

#[test]
fn degenerate_fixture_fails_validation() {
    let fb = bank_from_json(&fixture("degenerate_bank.json")).unwrap();
    let report = fb.validate(5, 1e-10).unwrap();
    assert!(!report.passed);
    assert!(report.max_defect >= 0.1);
}

#[test]
fn ifs_fixtures_match_constructors() {
    assert_eq!(ifs_from_json(&fixture("cantor_ifs.json")).unwrap(), cantor_ifs());
    assert_eq!(ifs_from_json(&fixture("dyadic_ifs.json")).unwrap(), dyadic_ifs());
}

#[test]
fn vector_fixtures() {
    assert_eq!(
        vector_from_json(&fixture("e0.json")).unwrap(),
        CoeffVector::basis(0)
    );
    assert_eq!(
        vector_from_json(&fixture("e1.json")).unwrap(),
        CoeffVector::basis(1)
    );
    let f = vector_from_json(&fixture("e0e2.json")).unwrap();
    assert!((f.norm() - 1.0).abs() <= 1e-12);
    assert_eq!(f.n_entries(), 2);
    assert_eq!(f.coeff(0), f.coeff(2));
}
