//! The channel operators `S_j f(z) = m_j(z) f(z^N)` and their adjoints,
//! acting on finitely supported coefficient sequences, plus the joint
//! adjoint eigenproblem `S_j* f = λ_j f`.
//!
//! On coefficients the operators are exact convolution/decimation sums:
//!
//! * `(S_j f)^(n) = Σ_m  m̂_j(n − N·m) · f̂(m)`
//! * `(S_j* f)^(m) = Σ_n  conj(m̂_j(n − N·m)) · f̂(n)`
//!
//! The adjoint formula follows from `⟨S_j f, g⟩ = ⟨f, S_j* g⟩` on the basis
//! vectors.  For a unitary bank the family satisfies `S_j* S_k = δ_{j,k} I`
//! and `Σ_j S_j S_j* = I` up to floating-point error.

use crate::coeff::CoeffVector;
use crate::error::{Error, Result};
use crate::filterbank::FilterBank;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Default residual tolerance for the joint eigenproblem.
pub const EIGEN_TOL: f64 = 1e-8;

/// `S_j f`.  Isometric for validated banks: `‖S_j f‖ = ‖f‖`.
pub fn apply_s(fb: &FilterBank, j: usize, f: &CoeffVector) -> Result<CoeffVector> {
    let filter = fb.filter(j)?;
    let n = fb.n_channels() as i64;
    Ok(CoeffVector::new(f.entries().flat_map(|(m, fm)| {
        filter.terms().map(move |(d, c)| (d + n * m, c * fm))
    })))
}

/// `S_j* f`.  The support of the result is contained in
/// `⌈(min supp f − max deg)/N⌉ ..= ⌊(max supp f − min deg)/N⌋`.
pub fn apply_s_star(fb: &FilterBank, j: usize, f: &CoeffVector) -> Result<CoeffVector> {
    let filter = fb.filter(j)?;
    let n = fb.n_channels() as i64;
    let g = CoeffVector::new(f.entries().flat_map(|(idx, fn_)| {
        filter.terms().filter_map(move |(d, c)| {
            let rem = idx - d;
            (rem.rem_euclid(n) == 0).then(|| (rem.div_euclid(n), c.conj() * fn_))
        })
    }));
    debug_assert!(
        {
            match (f.support(), g.support()) {
                (Some((fmin, fmax)), Some((gmin, gmax))) => {
                    let lo = (fmin - fb.max_degree()).div_euclid(n)
                        + i64::from((fmin - fb.max_degree()).rem_euclid(n) != 0);
                    let hi = (fmax - fb.min_degree()).div_euclid(n);
                    gmin >= lo && gmax <= hi
                }
                _ => true,
            }
        },
        "adjoint support bound violated"
    );
    Ok(g)
}

/// `S_α* f = S_{α_k}* … S_{α_1}* f`; the first digit of the word acts first.
pub fn apply_word_star(fb: &FilterBank, word: &[u8], f: &CoeffVector) -> Result<CoeffVector> {
    let mut v = f.clone();
    for &digit in word {
        v = apply_s_star(fb, digit as usize, &v)?;
    }
    Ok(v)
}

/// The word projection `S_α S_α* f`.
pub fn word_projection(fb: &FilterBank, word: &[u8], f: &CoeffVector) -> Result<CoeffVector> {
    let mut v = apply_word_star(fb, word, f)?;
    for &digit in word.iter().rev() {
        v = apply_s(fb, digit as usize, &v)?;
    }
    Ok(v)
}

/// Worst-case defects of the two defining relations over a probe set.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CuntzRelationsReport {
    /// `max ‖S_j* S_k f − δ_{j,k} f‖` over probes and channel pairs.
    pub max_orthogonality_defect: f64,
    /// `max ‖Σ_j S_j S_j* f − f‖` over probes.
    pub max_completeness_defect: f64,
    pub probes_checked: usize,
    pub passed: bool,
}

/// Measures both Cuntz relations on every probe vector.
pub fn verify_cuntz_relations(
    fb: &FilterBank,
    probes: &[CoeffVector],
    tol: f64,
) -> Result<CuntzRelationsReport> {
    if probes.is_empty() {
        return Err(Error::InvalidParameter("no probe vectors supplied".into()));
    }
    let n = fb.n_channels();
    let mut ortho: f64 = 0.0;
    let mut complete: f64 = 0.0;
    for f in probes {
        let mut total = CoeffVector::zero();
        for k in 0..n {
            let sk = apply_s(fb, k, f)?;
            for j in 0..n {
                let sjsk = apply_s_star(fb, j, &sk)?;
                let defect = if j == k { (&sjsk - f).norm() } else { sjsk.norm() };
                ortho = ortho.max(defect);
            }
            let proj = apply_s(fb, k, &apply_s_star(fb, k, f)?)?;
            total = &total + &proj;
        }
        complete = complete.max((&total - f).norm());
    }
    Ok(CuntzRelationsReport {
        max_orthogonality_defect: ortho,
        max_completeness_defect: complete,
        probes_checked: probes.len(),
        passed: ortho <= tol && complete <= tol,
    })
}

/// Result of the windowed joint eigenvector search.
#[derive(Debug, Clone)]
pub struct EigenSolution {
    pub found: bool,
    /// Unit-norm candidate when `found`; best near-miss otherwise (zero if
    /// the search produced no candidate at all).
    pub vector: CoeffVector,
    pub lambdas: Vec<Complex64>,
    /// `max_j ‖S_j* f − λ_j f‖`, evaluated with the full operators.
    pub residual: f64,
}

/// Default search window `max(8, 2·max |degree|)`.
pub fn default_window(fb: &FilterBank) -> i64 {
    8.max(2 * fb.max_abs_degree())
}

/// Matrix of `S_j*` restricted to coefficients supported in `[-w, w]`.
fn restricted_adjoint(fb: &FilterBank, j: usize, w: i64) -> Result<DMatrix<Complex64>> {
    let n = fb.n_channels() as i64;
    let dim = (2 * w + 1) as usize;
    let filter = fb.filter(j)?;
    let mut a = DMatrix::<Complex64>::zeros(dim, dim);
    for col in 0..dim {
        let src = col as i64 - w;
        for (d, c) in filter.terms() {
            let rem = src - d;
            if rem.rem_euclid(n) == 0 {
                let dst = rem.div_euclid(n);
                if (-w..=w).contains(&dst) {
                    a[((dst + w) as usize, col)] += c.conj();
                }
            }
        }
    }
    Ok(a)
}

/// Searches for a unit vector supported in `{-w..w}` satisfying all N
/// adjoint eigenvalue equations within `eigen_tol`.
///
/// The window must be invariant under every restricted adjoint, which holds
/// once `w ≥ max|degree| / (N−1)`; candidate subspaces are generated by
/// intersecting near-eigenspaces channel by channel and the winner is
/// re-checked against the unrestricted operators, so `found = true` is
/// certified while `found = false` only means "not found in this window".
pub fn solve_joint_eigenproblem(fb: &FilterBank, window: i64, eigen_tol: f64) -> Result<EigenSolution> {
    let n = fb.n_channels() as i64;
    if window < 1 {
        return Err(Error::InvalidParameter("window must be ≥ 1".into()));
    }
    // S_j* maps [-w,w] into [ceil((-w - maxdeg)/N), floor((w - mindeg)/N)];
    // invariance needs both ends inside the window.
    let lo_ok = -window - fb.max_degree() >= -n * window;
    let hi_ok = (window - fb.min_degree()).div_euclid(n) <= window;
    if !(lo_ok && hi_ok) {
        let required = (fb.max_degree().max(-fb.min_degree()) + n - 2).div_euclid(n - 1);
        return Err(Error::WindowTooSmall {
            window,
            required: required.max(1),
        });
    }

    let dim = (2 * window + 1) as usize;
    let mats: Vec<DMatrix<Complex64>> = (0..fb.n_channels())
        .map(|j| restricted_adjoint(fb, j, window))
        .collect::<Result<_>>()?;

    let mut subspaces: Vec<DMatrix<Complex64>> = Vec::new();
    intersect_eigenspaces(&mats, 0, DMatrix::identity(dim, dim), &mut subspaces)?;

    let mut best: Option<EigenSolution> = None;
    for basis in &subspaces {
        let col: Vec<Complex64> = basis.column(0).iter().copied().collect();
        let candidate = window_vector(&col, window);
        let Some(f) = candidate.normalized() else { continue };
        let mut lambdas = Vec::with_capacity(fb.n_channels());
        let mut residual: f64 = 0.0;
        for j in 0..fb.n_channels() {
            let sf = apply_s_star(fb, j, &f)?;
            let lambda = f.inner(&sf);
            residual = residual.max((&sf - &f.scaled(lambda)).norm());
            lambdas.push(lambda);
        }
        let sol = EigenSolution {
            found: residual <= eigen_tol,
            vector: f,
            lambdas,
            residual,
        };
        if sol.found {
            return Ok(sol);
        }
        if best.as_ref().is_none_or(|b| sol.residual < b.residual) {
            best = Some(sol);
        }
    }
    Ok(best.unwrap_or(EigenSolution {
        found: false,
        vector: CoeffVector::zero(),
        lambdas: Vec::new(),
        residual: f64::INFINITY,
    }))
}

/// Recursively intersects eigenspaces: every vector in an emitted basis is a
/// near-eigenvector of all processed operators.  Candidate eigenvalues come
/// from the Schur form of the compressed operator; generous kernel
/// thresholds are fine because the caller re-checks residuals exactly.
fn intersect_eigenspaces(
    mats: &[DMatrix<Complex64>],
    idx: usize,
    basis: DMatrix<Complex64>,
    out: &mut Vec<DMatrix<Complex64>>,
) -> Result<()> {
    if basis.ncols() == 0 {
        return Ok(());
    }
    if idx == mats.len() {
        out.push(basis);
        return Ok(());
    }
    let a = &mats[idx];
    let ab = a * &basis;
    let compressed = basis.adjoint() * &ab;
    // off-subspace leak of A restricted to the candidate subspace
    let leak = &ab - &basis * &compressed;

    let schur = compressed
        .clone()
        .try_schur(1e-14, 10_000)
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    let eigenvalues = schur
        .eigenvalues()
        .ok_or_else(|| Error::Numerical("Schur form yielded no eigenvalues".into()))?;

    let scale = 1.0 + compressed.norm();
    let mut clusters: Vec<Complex64> = Vec::new();
    for ev in eigenvalues.iter() {
        if !clusters.iter().any(|c| (c - ev).norm() <= 1e-8 * scale) {
            clusters.push(*ev);
        }
    }
    // largest modulus first, deterministic tie-breaking
    clusters.sort_by(|a, b| {
        b.norm()
            .partial_cmp(&a.norm())
            .unwrap()
            .then(b.re.partial_cmp(&a.re).unwrap())
            .then(b.im.partial_cmp(&a.im).unwrap())
    });

    let d = compressed.ncols();
    for lambda in clusters {
        // kernel of [(R − λI); leak]: eigenvector of R that stays inside
        // the subspace under A
        let shifted = &compressed - DMatrix::from_diagonal_element(d, d, lambda);
        let mut stacked = DMatrix::<Complex64>::zeros(d + leak.nrows(), d);
        stacked.view_mut((0, 0), (d, d)).copy_from(&shifted);
        stacked.view_mut((d, 0), (leak.nrows(), d)).copy_from(&leak);
        if let Some(kernel) = kernel_basis(&stacked, 1e-7) {
            intersect_eigenspaces(mats, idx + 1, &basis * kernel, out)?;
        }
    }
    Ok(())
}

/// Orthonormal kernel basis via SVD; `None` when the kernel is trivial.
fn kernel_basis(m: &DMatrix<Complex64>, rel_tol: f64) -> Option<DMatrix<Complex64>> {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t?;
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let tol = rel_tol * smax.max(1.0);
    // the stacked matrix is tall, so all ncols singular values are present
    let rows: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= tol)
        .collect();
    if rows.is_empty() {
        return None;
    }
    let mut basis = DMatrix::<Complex64>::zeros(m.ncols(), rows.len());
    for (out_col, &r) in rows.iter().enumerate() {
        for c in 0..m.ncols() {
            basis[(c, out_col)] = v_t[(r, c)].conj();
        }
    }
    Some(basis)
}

/// Converts a window-indexed slice back to a coefficient vector, fixing the
/// global phase so the largest entry is real positive.
fn window_vector(slice: &[Complex64], w: i64) -> CoeffVector {
    let mut max_c = Complex64::new(0.0, 0.0);
    for &v in slice {
        if v.norm() > max_c.norm() {
            max_c = v;
        }
    }
    let phase = if max_c.norm() > 0.0 {
        max_c.conj() / max_c.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    CoeffVector::new(
        slice
            .iter()
            .enumerate()
            .map(|(i, &v)| (i as i64 - w, v * phase)),
    )
}
