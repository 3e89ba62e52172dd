//! Finite-resolution absolute-continuity diagnostics for the channel
//! pushforward measures, plus the cross-check tying the adjoint
//! eigenproblem to the scalar-weight IFS cascade.
//!
//! The cyclicity criterion is inherently one-sided at finite depth: a
//! pushforward atom carrying mass where the base measure carries none
//! conclusively breaks absolute continuity, while the absence of such a
//! witness at level k is evidence only.

use crate::coeff::CoeffVector;
use crate::cuntz::{
    apply_s, default_window, solve_joint_eigenproblem, word_projection, EIGEN_TOL,
};
use crate::error::{Error, Result};
use crate::filterbank::FilterBank;
use crate::hutchinson::{cascade, nadic_ifs};
use crate::nadic::{atom_tree, cdf, refinement_residual, AtomTree, AtomicMeasure};
use num_complex::Complex64;
use serde::Serialize;

/// Default mass floor below which an atom counts as absent.
pub const AC_TOL: f64 = 1e-12;

/// Wording carried by every report: the cyclicity ⇔ absolute-continuity
/// equivalence presupposes the word-projection algebra is maximally
/// abelian, which this tool cannot verify.
pub const CAVEAT: &str = "under the standing hypothesis that the word-projection algebra is \
     maximally abelian; NO_VIOLATION_AT_LEVEL is finite-depth evidence, not proof, of cyclicity";

/// `μ_{S_j f}` at depth k: the depth-k atoms of the channel-j pushforward
/// `μ_f ∘ σ_j^{-1}`.
///
/// Computed by applying the forward operator and enumerating the tree; the
/// equivalent digit-prepend construction from the depth-(k−1) base measure
/// is evaluated too and the two must agree within 1e-12.
pub fn pushforward_measure(
    fb: &FilterBank,
    f: &CoeffVector,
    j: usize,
    k: u32,
) -> Result<AtomicMeasure> {
    let pushed = apply_s(fb, j, f)?;
    let via_operator = atom_tree(fb, &pushed, k, 0.0)?;
    if k >= 1 {
        let via_prepend = atom_tree(fb, f, k - 1, 0.0)?.prepended(j as u8)?;
        let gap = via_operator.tv_distance(&via_prepend)?;
        if gap > 1e-12 {
            return Err(Error::Numerical(format!(
                "pushforward routes disagree by {gap:e} on channel {j}"
            )));
        }
    }
    Ok(via_operator)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CyclicityVerdict {
    NoViolationAtLevel,
    Violation,
}

/// An address where a channel pushforward carries mass but the base
/// measure does not.
#[derive(Debug, Clone, Serialize)]
pub struct CyclicityWitness {
    pub channel: usize,
    pub numerator: u64,
    pub depth: u32,
    pub push_mass: f64,
    pub base_mass: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CyclicityReport {
    pub verdict: CyclicityVerdict,
    pub level: u32,
    pub witnesses: Vec<CyclicityWitness>,
    pub caveat: String,
}

/// Compares every channel pushforward against `μ_f` at depth k and lists
/// absolute-continuity violations.
pub fn cyclicity_test(
    fb: &FilterBank,
    f: &CoeffVector,
    k: u32,
    ac_tol: f64,
) -> Result<CyclicityReport> {
    let norm = f.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotUnitVector { norm });
    }
    let base = atom_tree(fb, f, k, 0.0)?;
    let mut witnesses = Vec::new();
    for j in 0..fb.n_channels() {
        let push = pushforward_measure(fb, f, j, k)?;
        for (numerator, push_mass) in push.atoms() {
            if push_mass > ac_tol {
                let base_mass = base.mass_at(numerator);
                if base_mass <= ac_tol {
                    witnesses.push(CyclicityWitness {
                        channel: j,
                        numerator,
                        depth: k,
                        push_mass,
                        base_mass,
                    });
                }
            }
        }
    }
    Ok(CyclicityReport {
        verdict: if witnesses.is_empty() {
            CyclicityVerdict::NoViolationAtLevel
        } else {
            CyclicityVerdict::Violation
        },
        level: k,
        witnesses,
        caveat: CAVEAT.to_string(),
    })
}

/// Per-atom mass ratios `μ₁{x}/μ₂{x}`, the depth-k discretization of the
/// density of μ₁ against μ₂.
#[derive(Debug, Clone, Serialize)]
pub struct RadonNikodymProfile {
    pub base: u32,
    pub depth: u32,
    /// `(numerator, ratio)` where both atoms exceed the tolerance.
    pub ratios: Vec<(u64, f64)>,
    /// Atoms of μ₁ with no matching μ₂ mass: the singular part witnesses.
    pub singular: Vec<(u64, f64)>,
}

pub fn radon_nikodym_profile(
    mu1: &AtomicMeasure,
    mu2: &AtomicMeasure,
    ac_tol: f64,
) -> Result<RadonNikodymProfile> {
    if mu1.base() != mu2.base() || mu1.depth() != mu2.depth() {
        return Err(Error::DepthMismatch {
            base_a: mu1.base(),
            depth_a: mu1.depth(),
            base_b: mu2.base(),
            depth_b: mu2.depth(),
        });
    }
    let mut ratios = Vec::new();
    let mut singular = Vec::new();
    for (numerator, m1) in mu1.atoms() {
        if m1 <= ac_tol {
            continue;
        }
        let m2 = mu2.mass_at(numerator);
        if m2 > ac_tol {
            ratios.push((numerator, m1 / m2));
        } else {
            singular.push((numerator, m1));
        }
    }
    Ok(RadonNikodymProfile {
        base: mu1.base(),
        depth: mu1.depth(),
        ratios,
        singular,
    })
}

/// Outcome of comparing the eigenvector tree measure with the IFS cascade
/// driven by the eigenvalue weights.
#[derive(Debug, Clone, Serialize)]
pub struct EigenCrossCheck {
    pub eigen_found: bool,
    /// Best residual the search saw; absent when it had no candidate at all.
    pub eigen_residual: Option<f64>,
    /// `|λ_j|²` used as cascade weights (empty when nothing was found).
    pub weights: Vec<f64>,
    pub depth: u32,
    pub atoms_tree: usize,
    pub atoms_cascade: usize,
    /// True when the two atom position lists agree float-exactly.
    pub positions_exact: bool,
    /// Comparisons are absent when no eigenvector was found or the atom
    /// counts differ.
    pub max_position_gap: Option<f64>,
    pub max_mass_discrepancy: Option<f64>,
}

/// Runs the joint eigenproblem; on success builds the base-N cascade from
/// `δ_0` with weights `|λ_j|²` at depth k and compares it atom by atom with
/// the eigenvector's tree measure.
pub fn eigen_cross_check(fb: &FilterBank, k: u32) -> Result<EigenCrossCheck> {
    let sol = solve_joint_eigenproblem(fb, default_window(fb), EIGEN_TOL)?;
    if !sol.found {
        return Ok(EigenCrossCheck {
            eigen_found: false,
            eigen_residual: sol.residual.is_finite().then_some(sol.residual),
            weights: Vec::new(),
            depth: k,
            atoms_tree: 0,
            atoms_cascade: 0,
            positions_exact: false,
            max_position_gap: None,
            max_mass_discrepancy: None,
        });
    }
    let raw: Vec<f64> = sol.lambdas.iter().map(|l| l.norm_sqr()).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();

    let mu_tree = atom_tree(fb, &sol.vector, k, 0.0)?;
    let ifs = nadic_ifs(fb.n_channels() as u32, weights.clone())?;
    let cloud = cascade(&ifs, k, 0.0)?;

    let tree_atoms: Vec<(f64, f64)> = mu_tree.addresses().map(|(a, m)| (a.value(), m)).collect();
    let cascade_atoms: Vec<(f64, f64)> = cloud.atoms().collect();

    let mut positions_exact = tree_atoms.len() == cascade_atoms.len();
    let mut comparison = None;
    if positions_exact {
        let mut max_gap = 0.0f64;
        let mut max_mass = 0.0f64;
        for (&(xt, mt), &(xc, mc)) in tree_atoms.iter().zip(&cascade_atoms) {
            if xt != xc {
                positions_exact = false;
            }
            max_gap = max_gap.max((xt - xc).abs());
            max_mass = max_mass.max((mt - mc).abs());
        }
        comparison = Some((max_gap, max_mass));
    }
    Ok(EigenCrossCheck {
        eigen_found: true,
        eigen_residual: Some(sol.residual),
        weights,
        depth: k,
        atoms_tree: tree_atoms.len(),
        atoms_cascade: cascade_atoms.len(),
        positions_exact,
        max_position_gap: comparison.map(|c| c.0),
        max_mass_discrepancy: comparison.map(|c| c.1),
    })
}

/// One row of the distribution-function convergence table.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub k: u32,
    /// `sup_grid |F^{(k)} − F^{(k_max)}|`.
    pub sup_diff: f64,
    /// Total-variation residual of the one-step refinement identity at k.
    pub refinement_residual: f64,
}

/// Tabulates how fast the distribution functions settle: for each
/// `k = k_min .. k_max−1`, the sup over the grid of
/// `|F^{(k)}(x) − F^{(k_max)}(x)|`.  The tree is refined level by level so
/// intermediate depths reuse the retained leaf vectors.
pub fn convergence_profile(
    fb: &FilterBank,
    f: &CoeffVector,
    k_min: u32,
    k_max: u32,
    grid: &[f64],
) -> Result<Vec<ConvergenceRow>> {
    if k_min >= k_max {
        return Err(Error::InvalidParameter(format!(
            "k_min {k_min} must be below k_max {k_max}"
        )));
    }
    let mut tree = AtomTree::build(fb, f, k_min, 0.0)?;
    let mut per_level: Vec<(u32, Vec<f64>)> = vec![(k_min, cdf(&tree.measure(), grid))];
    while tree.depth() < k_max {
        tree = tree.refine(fb)?;
        per_level.push((tree.depth(), cdf(&tree.measure(), grid)));
    }
    let (_, final_cdf) = per_level.last().cloned().expect("at least one level");
    let mut rows = Vec::new();
    for (k, level_cdf) in &per_level[..per_level.len() - 1] {
        let sup = level_cdf
            .iter()
            .zip(&final_cdf)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        rows.push(ConvergenceRow {
            k: *k,
            sup_diff: sup,
            refinement_residual: if *k >= 1 {
                refinement_residual(fb, f, *k)?
            } else {
                0.0
            },
        });
    }
    Ok(rows)
}

/// `⟨g_α, g_β⟩` for all depth-k words, where `g_α = S_α S_α* f`.  For a
/// validated bank this matrix is diagonal with the atom masses on the
/// diagonal.
pub fn word_projection_gram(
    fb: &FilterBank,
    f: &CoeffVector,
    k: u32,
) -> Result<Vec<Vec<Complex64>>> {
    let n = fb.n_channels() as u64;
    let words = n.checked_pow(k).ok_or(Error::DepthOverflow {
        leaves: u64::MAX,
        cap: crate::nadic::ENUMERATION_CAP,
    })?;
    if words > 4096 {
        return Err(Error::DepthOverflow {
            leaves: words,
            cap: 4096,
        });
    }
    let mut projected = Vec::with_capacity(words as usize);
    for w in 0..words {
        let mut digits = vec![0u8; k as usize];
        let mut rem = w;
        for d in digits.iter_mut().rev() {
            *d = (rem % n) as u8;
            rem /= n;
        }
        projected.push(word_projection(fb, &digits, f)?);
    }
    Ok(projected
        .iter()
        .map(|ga| projected.iter().map(|gb| ga.inner(gb)).collect())
        .collect())
}
