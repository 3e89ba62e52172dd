//! Shared generators for the property suites: random validated banks and
//! random finitely supported vectors, all driven by a seeded stream.

use ifs_measures::filterbank::{fourier_basis_bank, FilterBank};
use ifs_measures::hutchinson::SplitMix64;
use ifs_measures::laurent::LaurentPolynomial;
use ifs_measures::CoeffVector;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// A random unitary constant-matrix mixing of the DFT bank with per-filter
/// unimodular phases.  Both transformations preserve unitarity of the
/// sampled matrix, and `e_0` stays a joint adjoint eigenvector.
pub fn random_mixed_bank(rng: &mut SplitMix64, n: usize) -> FilterBank {
    let base = fourier_basis_bank(n).unwrap();
    // unitary mix from the QR factor of a random complex matrix
    let g = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5)
    });
    let q = g.qr().q();
    let filters: Vec<LaurentPolynomial> = (0..n)
        .map(|i| {
            let phase = Complex64::from_polar(1.0, std::f64::consts::TAU * rng.next_f64());
            let mut terms: Vec<(i64, Complex64)> = Vec::new();
            for j in 0..n {
                for (d, c) in base.filters()[j].terms() {
                    terms.push((d, phase * q[(i, j)] * c));
                }
            }
            LaurentPolynomial::new(terms)
        })
        .collect();
    FilterBank::new(filters).unwrap()
}

/// A random validated bank: a mixed bank further decorated with `z^{N·t}`
/// shifts (which also preserve unitarity but move the eigenvector away
/// from `e_0`).  Validation is asserted so downstream property failures
/// cannot stem from a bad generator.
pub fn random_bank(rng: &mut SplitMix64, n: usize) -> FilterBank {
    let mixed = random_mixed_bank(rng, n);
    let decorated: Vec<LaurentPolynomial> = mixed
        .filters()
        .iter()
        .map(|p| {
            let shift = (rng.next_u64() % 3) as i64 * n as i64;
            p.shifted(shift)
        })
        .collect();
    let fb = FilterBank::new(decorated).unwrap();
    let report = fb.validate_default().unwrap();
    assert!(
        report.passed,
        "random bank construction must stay unitary (defect {:e})",
        report.max_defect
    );
    fb
}

/// A random vector with at most `max_support` entries in `[-range, range]`.
pub fn random_vector(rng: &mut SplitMix64, max_support: usize, range: i64) -> CoeffVector {
    let count = 1 + (rng.next_u64() as usize) % max_support;
    CoeffVector::new((0..count).map(|_| {
        let idx = (rng.next_u64() % (2 * range as u64 + 1)) as i64 - range;
        (
            idx,
            Complex64::new(rng.next_f64() * 2.0 - 1.0, rng.next_f64() * 2.0 - 1.0),
        )
    }))
}

/// Unit-norm variant of [`random_vector`]; retries until nonzero.
pub fn random_unit_vector(rng: &mut SplitMix64, max_support: usize, range: i64) -> CoeffVector {
    loop {
        if let Some(v) = random_vector(rng, max_support, range).normalized() {
            return v;
        }
    }
}
