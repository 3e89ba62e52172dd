//! Finitely supported Fourier coefficient sequences: the vectors the
//! channel operators act on.

use crate::laurent::COEFF_ZERO_TOL;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::ops::{Add, Sub};

/// A map `index -> coefficient` with finitely many nonzero entries.
///
/// Entries with modulus at or below [`COEFF_ZERO_TOL`] are dropped whenever
/// a vector is built, so the support stays tight across repeated operator
/// applications.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoeffVector {
    coeffs: BTreeMap<i64, Complex64>,
}

impl CoeffVector {
    pub fn new(entries: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        let mut coeffs: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (n, c) in entries {
            *coeffs.entry(n).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        coeffs.retain(|_, c| c.norm() > COEFF_ZERO_TOL);
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// The basis vector `e_n`.
    pub fn basis(n: i64) -> Self {
        Self::new([(n, Complex64::new(1.0, 0.0))])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, n: i64) -> Complex64 {
        self.coeffs
            .get(&n)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn entries(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&n, &c)| (n, c))
    }

    pub fn n_entries(&self) -> usize {
        self.coeffs.len()
    }

    /// `(min index, max index)` of the support, `None` when zero.
    pub fn support(&self) -> Option<(i64, i64)> {
        match (self.coeffs.keys().next(), self.coeffs.keys().next_back()) {
            (Some(&a), Some(&b)) => Some((a, b)),
            _ => None,
        }
    }

    pub fn norm_sq(&self) -> f64 {
        // fold from +0.0: an empty f64 Sum yields -0.0, which sqrt and
        // max would then propagate
        self.coeffs.values().map(|c| c.norm_sqr()).fold(0.0, |a, x| a + x)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `⟨self, other⟩ = Σ conj(self[n])·other[n]`, conjugate-linear in the
    /// first argument.
    pub fn inner(&self, other: &Self) -> Complex64 {
        // iterate the sparser side
        let small = if self.n_entries() <= other.n_entries() {
            self
        } else {
            other
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, _) in small.entries() {
            acc += self.coeff(n).conj() * other.coeff(n);
        }
        acc
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self::new(self.entries().map(|(n, v)| (n, v * c)))
    }

    /// Unit-norm copy, `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n == 0.0 {
            None
        } else {
            Some(self.scaled(Complex64::new(1.0 / n, 0.0)))
        }
    }
}

impl Add for &CoeffVector {
    type Output = CoeffVector;
    fn add(self, rhs: &CoeffVector) -> CoeffVector {
        CoeffVector::new(self.entries().chain(rhs.entries()))
    }
}

impl Sub for &CoeffVector {
    type Output = CoeffVector;
    fn sub(self, rhs: &CoeffVector) -> CoeffVector {
        CoeffVector::new(
            self.entries()
                .chain(rhs.entries().map(|(n, c)| (n, -c))),
        )
    }
}
