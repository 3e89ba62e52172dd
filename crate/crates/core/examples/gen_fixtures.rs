//! Regenerates the JSON fixture files under `fixtures/` at the repository
//! root.  Run with `cargo run -p ifs-measures --example gen_fixtures`.

use ifs_measures::filterbank::{daubechies4_bank, fourier_basis_bank, monomial_bank, FilterBank};
use ifs_measures::hutchinson::{cantor_ifs, dyadic_ifs};
use ifs_measures::io::{bank_to_json, ifs_to_json, vector_to_json};
use ifs_measures::{CoeffVector, LaurentPolynomial};
use num_complex::Complex64;
use std::path::PathBuf;

fn main() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    std::fs::create_dir_all(&dir).expect("fixtures dir");
    let write = |name: &str, text: String| {
        let path = dir.join(name);
        std::fs::write(&path, text + "\n").expect("write fixture");
        println!("wrote {}", path.display());
    };

    write("shift_bank.json", bank_to_json(&monomial_bank(2).unwrap()));
    write("haar_bank.json", bank_to_json(&fourier_basis_bank(2).unwrap()));
    write(
        "fourier3_bank.json",
        bank_to_json(&fourier_basis_bank(3).unwrap()),
    );
    write(
        "fourier4_bank.json",
        bank_to_json(&fourier_basis_bank(4).unwrap()),
    );
    write(
        "monomial3_bank.json",
        bank_to_json(&monomial_bank(3).unwrap()),
    );
    write("d4_bank.json", bank_to_json(&daubechies4_bank()));

    // two identical constant filters: the matrix columns coincide, so the
    // unitarity check must fail with defect 1/2
    let c = Complex64::new(1.0 / 2.0f64.sqrt(), 0.0);
    let degenerate = FilterBank::new(vec![
        LaurentPolynomial::constant(c),
        LaurentPolynomial::constant(c),
    ])
    .unwrap();
    write("degenerate_bank.json", bank_to_json(&degenerate));

    write("cantor_ifs.json", ifs_to_json(&cantor_ifs()));
    write("dyadic_ifs.json", ifs_to_json(&dyadic_ifs()));

    write("e0.json", vector_to_json(&CoeffVector::basis(0)));
    write("e1.json", vector_to_json(&CoeffVector::basis(1)));
    let e0e2 = CoeffVector::new([(0, c), (2, c)]);
    write("e0e2.json", vector_to_json(&e0e2));
}
