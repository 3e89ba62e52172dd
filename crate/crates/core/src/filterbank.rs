//! N-channel filter banks and the unitarity check that makes the induced
//! shift operators a family of isometries with orthogonal ranges.
//!
//! A bank holds N Laurent polynomials `m_0, …, m_{N-1}`.  It is *unitary*
//! when the N×N matrix `M(z)[j][k] = m_j(z ω^k) / √N`, with `ω = e^{i2π/N}`,
//! is unitary for every `z` on the unit circle.  Each entry of `M(z)*M(z)`
//! is itself a Laurent polynomial of bounded degree span, so checking the
//! identity on a sufficiently dense sample grid certifies it everywhere up
//! to floating-point error.

use crate::error::{Error, Result};
use crate::laurent::{unit_root, LaurentPolynomial};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::TAU;

/// Default entrywise tolerance for the unitarity defect.
pub const UNITARITY_TOL: f64 = 1e-10;

/// A bank of `N ≥ 2` filters indexed `0..N-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    filters: Vec<LaurentPolynomial>,
}

/// Outcome of sampling the unitarity defect over the circle.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    /// Largest entrywise modulus of `M(z)*M(z) − I` over all samples.
    pub max_defect: f64,
    /// Angle in `[0, 2π)` of the sample attaining `max_defect`.
    pub worst_z: f64,
    pub samples_checked: usize,
}

impl FilterBank {
    pub fn new(filters: Vec<LaurentPolynomial>) -> Result<Self> {
        if filters.len() < 2 {
            return Err(Error::MalformedBank(format!(
                "need at least 2 filters, got {}",
                filters.len()
            )));
        }
        Ok(Self { filters })
    }

    pub fn n_channels(&self) -> usize {
        self.filters.len()
    }

    pub fn filter(&self, j: usize) -> Result<&LaurentPolynomial> {
        self.filters.get(j).ok_or(Error::ChannelOutOfRange {
            channel: j,
            n_channels: self.filters.len(),
        })
    }

    pub fn filters(&self) -> &[LaurentPolynomial] {
        &self.filters
    }

    /// Smallest degree appearing in any filter (0 for an all-zero bank).
    pub fn min_degree(&self) -> i64 {
        self.filters
            .iter()
            .filter_map(LaurentPolynomial::min_degree)
            .min()
            .unwrap_or(0)
    }

    /// Largest degree appearing in any filter (0 for an all-zero bank).
    pub fn max_degree(&self) -> i64 {
        self.filters
            .iter()
            .filter_map(LaurentPolynomial::max_degree)
            .max()
            .unwrap_or(0)
    }

    /// Degree span across all filters; bounds the degree of every entry of
    /// `M(z)*M(z)`.
    pub fn degree_span(&self) -> i64 {
        self.max_degree() - self.min_degree()
    }

    pub fn max_abs_degree(&self) -> i64 {
        self.max_degree().abs().max(self.min_degree().abs())
    }

    /// Number of circle samples used by [`validate_default`](Self::validate_default):
    /// `4·span + 1`, past the Nyquist density `2·span + 1` of the defect
    /// polynomial.
    pub fn default_samples(&self) -> usize {
        (4 * self.degree_span() + 1) as usize
    }

    /// Samples `‖M(z)*M(z) − I‖_max` at `n_samples` equispaced points
    /// `z = e^{i2πs/n_samples}`.
    pub fn validate(&self, n_samples: usize, unitarity_tol: f64) -> Result<ValidationReport> {
        let needed = (2 * self.degree_span() + 1) as usize;
        if n_samples < needed {
            return Err(Error::InvalidParameter(format!(
                "{n_samples} samples cannot certify a degree span of {} (need at least {needed})",
                self.degree_span()
            )));
        }
        if unitarity_tol <= 0.0 {
            return Err(Error::InvalidParameter(
                "unitarity tolerance must be positive".into(),
            ));
        }
        let n = self.n_channels();
        let scale = 1.0 / (n as f64).sqrt();
        let mut max_defect: f64 = 0.0;
        let mut worst_s = 0usize;
        let den = (n_samples as i64) * (n as i64);
        for s in 0..n_samples {
            // z·ω^k = e^{i2π (s·N + k·n_samples) / (n_samples·N)}, so every
            // matrix entry is an exact rational unit-root evaluation.
            let mut m = vec![Complex64::new(0.0, 0.0); n * n];
            for j in 0..n {
                for k in 0..n {
                    let num = (s as i64) * (n as i64) + (k as i64) * (n_samples as i64);
                    m[j * n + k] = scale * self.filters[j].eval_unit_root(num, den);
                }
            }
            // G = M^H M − I, entrywise max modulus
            for a in 0..n {
                for b in 0..n {
                    let mut g = Complex64::new(0.0, 0.0);
                    for j in 0..n {
                        g += m[j * n + a].conj() * m[j * n + b];
                    }
                    if a == b {
                        g -= Complex64::new(1.0, 0.0);
                    }
                    let d = g.norm();
                    if d > max_defect {
                        max_defect = d;
                        worst_s = s;
                    }
                }
            }
        }
        Ok(ValidationReport {
            passed: max_defect <= unitarity_tol,
            max_defect,
            worst_z: TAU * (worst_s as f64) / (n_samples as f64),
            samples_checked: n_samples,
        })
    }

    /// [`validate`](Self::validate) with the default sample density and
    /// tolerance.
    pub fn validate_default(&self) -> Result<ValidationReport> {
        self.validate(self.default_samples(), UNITARITY_TOL)
    }
}

/// The DFT bank `m_j(z) = (1/√N) Σ_{k<N} e^{i2πjk/N} z^k`; unitary for every
/// `N ≥ 2`.  At `N = 2` this is the Haar bank `(1±z)/√2`.
pub fn fourier_basis_bank(n: usize) -> Result<FilterBank> {
    if n < 2 {
        return Err(Error::MalformedBank(format!("channel count {n} < 2")));
    }
    let scale = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    let filters = (0..n)
        .map(|j| {
            LaurentPolynomial::new(
                (0..n).map(|k| (k as i64, scale * unit_root((j * k) as i64, n as i64))),
            )
        })
        .collect();
    FilterBank::new(filters)
}

/// The monomial bank `m_j(z) = z^j`.  At `N = 2` this is the plain shift
/// pair `f(z²), z f(z²)`.
pub fn monomial_bank(n: usize) -> Result<FilterBank> {
    if n < 2 {
        return Err(Error::MalformedBank(format!("channel count {n} < 2")));
    }
    let filters = (0..n)
        .map(|j| LaurentPolynomial::monomial(j as i64, Complex64::new(1.0, 0.0)))
        .collect();
    FilterBank::new(filters)
}

/// The two-channel bank built from the 4-tap Daubechies scaling
/// coefficients, normalized so that `Σ|coeff|² = 1` per filter, which is the
/// scaling this crate's unitarity convention requires.  The second filter is
/// the alternating flip of the first.
pub fn daubechies4_bank() -> FilterBank {
    let s3 = 3.0f64.sqrt();
    let d = 4.0 * 2.0f64.sqrt();
    let h = [(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d];
    let m0 = LaurentPolynomial::new(
        h.iter()
            .enumerate()
            .map(|(k, &v)| (k as i64, Complex64::new(v, 0.0))),
    );
    let g: Vec<f64> = (0..4)
        .map(|k| if k % 2 == 0 { h[3 - k] } else { -h[3 - k] })
        .collect();
    let m1 = LaurentPolynomial::new(
        g.iter()
            .enumerate()
            .map(|(k, &v)| (k as i64, Complex64::new(v, 0.0))),
    );
    FilterBank::new(vec![m0, m1]).expect("two filters")
}
