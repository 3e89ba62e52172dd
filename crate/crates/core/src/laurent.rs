//! Sparse Laurent polynomials with complex coefficients, used as the
//! frequency-domain representation of a single filter.

use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::TAU;

/// Stored coefficients with modulus at or below this are dropped.
pub const COEFF_ZERO_TOL: f64 = 1e-15;

/// `e^{i 2π num/den}` with exact values on the quadrant points.
///
/// Keeping multiples of a quarter turn exact means banks whose coefficients
/// are fourth roots of unity (Haar, the N=2 and N=4 DFT banks, monomial
/// banks) evaluate without trigonometric rounding dust.
pub(crate) fn unit_root(num: i64, den: i64) -> Complex64 {
    debug_assert!(den > 0);
    let r = num.rem_euclid(den);
    if (4 * r) % den == 0 {
        match (4 * r / den) % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    } else {
        let theta = TAU * (r as f64) / (den as f64);
        Complex64::new(theta.cos(), theta.sin())
    }
}

/// A finitely supported map `degree -> coefficient`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LaurentPolynomial {
    coeffs: BTreeMap<i64, Complex64>,
}

impl LaurentPolynomial {
    /// Builds from `(degree, coefficient)` terms; duplicate degrees are
    /// summed and near-zero results dropped.
    pub fn new(terms: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        let mut coeffs: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (d, c) in terms {
            *coeffs.entry(d).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        coeffs.retain(|_, c| c.norm() > COEFF_ZERO_TOL);
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new([(0, c)])
    }

    /// `c · z^degree`.
    pub fn monomial(degree: i64, c: Complex64) -> Self {
        Self::new([(degree, c)])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, degree: i64) -> Complex64 {
        self.coeffs
            .get(&degree)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&d, &c)| (d, c))
    }

    pub fn n_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Sum of squared coefficient moduli, i.e. the squared L²(T) norm.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).fold(0.0, |a, x| a + x)
    }

    /// Evaluates at `z = e^{i 2π num/den}`.
    pub fn eval_unit_root(&self, num: i64, den: i64) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(&d, &c)| c * unit_root(d * num, den))
            .sum()
    }

    /// Multiplies every coefficient by `c`.
    pub fn scaled(&self, c: Complex64) -> Self {
        Self::new(self.terms().map(|(d, v)| (d, v * c)))
    }

    /// Multiplies by `z^shift`.
    pub fn shifted(&self, shift: i64) -> Self {
        Self::new(self.terms().map(|(d, v)| (d + shift, v)))
    }
}
