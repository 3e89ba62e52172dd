//! Depth-k atomic measures on `[0,1)` built by enumerating adjoint words.
//!
//! For a bank with N channels and a vector `f`, the depth-k approximant
//! places mass `‖S_α* f‖²` at the N-adic point `x_k(α) = Σ α_i N^{-i}` for
//! every word `α ∈ {0..N-1}^k`.  Atom positions are stored exactly as
//! `(numerator, depth)` integer pairs, never floats, so digit prepends and
//! refinement aggregation are exact integer operations.

use crate::coeff::CoeffVector;
use crate::cuntz::apply_s_star;
use crate::error::{Error, Result};
use crate::filterbank::FilterBank;
use num_complex::Complex64;

/// Hard cap on the number of leaves a tree enumeration may visit.
pub const ENUMERATION_CAP: u64 = 10_000_000;

/// An exact N-adic point `numerator / base^depth` in `[0,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct NAdicAddress {
    base: u32,
    depth: u32,
    numerator: u64,
}

impl NAdicAddress {
    pub fn new(base: u32, depth: u32, numerator: u64) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidParameter(format!("base {base} < 2")));
        }
        let cap = (base as u64)
            .checked_pow(depth)
            .ok_or_else(|| Error::InvalidParameter(format!("base^depth overflows: {base}^{depth}")))?;
        if numerator >= cap {
            return Err(Error::InvalidParameter(format!(
                "numerator {numerator} out of range for depth {depth} (must be < {cap})"
            )));
        }
        Ok(Self { base, depth, numerator })
    }

    pub fn from_digits(base: u32, digits: &[u8]) -> Result<Self> {
        let mut numerator: u64 = 0;
        for &d in digits {
            if u32::from(d) >= base {
                return Err(Error::InvalidParameter(format!("digit {d} ≥ base {base}")));
            }
            numerator = numerator * base as u64 + d as u64;
        }
        Self::new(base, digits.len() as u32, numerator)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    /// Digits `(α_1, …, α_k)`, most significant first.
    pub fn digits(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.depth as usize];
        let mut n = self.numerator;
        for slot in out.iter_mut().rev() {
            *slot = (n % self.base as u64) as u8;
            n /= self.base as u64;
        }
        out
    }

    /// Position as a float; exact whenever `base^depth` divides the
    /// numerator scale without rounding, e.g. for every dyadic address.
    pub fn value(&self) -> f64 {
        self.numerator as f64 / (self.base as u64).pow(self.depth) as f64
    }

    /// The image under `σ_j(x) = (x+j)/N`: prepends `j` as the leading
    /// digit.
    pub fn prepended(&self, digit: u8) -> Result<Self> {
        if u32::from(digit) >= self.base {
            return Err(Error::InvalidParameter(format!(
                "digit {digit} ≥ base {}",
                self.base
            )));
        }
        let scale = (self.base as u64).pow(self.depth);
        Self::new(
            self.base,
            self.depth + 1,
            digit as u64 * scale + self.numerator,
        )
    }
}

/// A depth-k atomic measure: distinct sorted addresses with nonnegative
/// masses; zero-mass atoms are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    base: u32,
    depth: u32,
    /// `(numerator, mass)` sorted by numerator.
    atoms: Vec<(u64, f64)>,
}

impl AtomicMeasure {
    pub fn from_atoms(base: u32, depth: u32, mut atoms: Vec<(u64, f64)>) -> Result<Self> {
        let cap = (base as u64)
            .checked_pow(depth)
            .ok_or_else(|| Error::InvalidParameter("base^depth overflows".into()))?;
        atoms.sort_by_key(|&(n, _)| n);
        for w in atoms.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidParameter(format!(
                    "duplicate atom at numerator {}",
                    w[0].0
                )));
            }
        }
        for &(n, m) in &atoms {
            if n >= cap {
                return Err(Error::InvalidParameter(format!("numerator {n} ≥ {cap}")));
            }
            if m < 0.0 {
                return Err(Error::InvalidParameter(format!("negative mass {m}")));
            }
        }
        atoms.retain(|&(_, m)| m > 0.0);
        Ok(Self { base, depth, atoms })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn n_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.atoms.iter().copied()
    }

    pub fn addresses(&self) -> impl Iterator<Item = (NAdicAddress, f64)> + '_ {
        self.atoms.iter().map(|&(n, m)| {
            (
                NAdicAddress {
                    base: self.base,
                    depth: self.depth,
                    numerator: n,
                },
                m,
            )
        })
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|&(_, m)| m).fold(0.0, |a, x| a + x)
    }

    pub fn mass_at(&self, numerator: u64) -> f64 {
        match self.atoms.binary_search_by_key(&numerator, |&(n, _)| n) {
            Ok(i) => self.atoms[i].1,
            Err(_) => 0.0,
        }
    }

    /// Pushforward under `σ_j`: every address gains `j` as leading digit.
    pub fn prepended(&self, digit: u8) -> Result<Self> {
        if u32::from(digit) >= self.base {
            return Err(Error::InvalidParameter(format!(
                "digit {digit} ≥ base {}",
                self.base
            )));
        }
        let scale = (self.base as u64)
            .checked_pow(self.depth)
            .ok_or_else(|| Error::InvalidParameter("base^depth overflows".into()))?;
        Ok(Self {
            base: self.base,
            depth: self.depth + 1,
            atoms: self
                .atoms
                .iter()
                .map(|&(n, m)| (digit as u64 * scale + n, m))
                .collect(),
        })
    }

    /// Aggregates atoms over the last digit, producing the depth-(k−1)
    /// measure.
    pub fn coarsened(&self) -> Result<Self> {
        if self.depth == 0 {
            return Err(Error::InvalidParameter(
                "cannot coarsen a depth-0 measure".into(),
            ));
        }
        let b = self.base as u64;
        let mut atoms: Vec<(u64, f64)> = Vec::with_capacity(self.atoms.len());
        for &(n, m) in &self.atoms {
            let parent = n / b;
            match atoms.last_mut() {
                Some((p, acc)) if *p == parent => *acc += m,
                _ => atoms.push((parent, m)),
            }
        }
        Ok(Self {
            base: self.base,
            depth: self.depth - 1,
            atoms,
        })
    }

    /// Sum of absolute per-atom mass differences (the total-variation norm
    /// of the signed difference measure).
    pub fn tv_distance(&self, other: &Self) -> Result<f64> {
        if self.base != other.base || self.depth != other.depth {
            return Err(Error::DepthMismatch {
                base_a: self.base,
                depth_a: self.depth,
                base_b: other.base,
                depth_b: other.depth,
            });
        }
        let mut total = 0.0;
        let (mut i, mut j) = (0usize, 0usize);
        while i < self.atoms.len() || j < other.atoms.len() {
            match (self.atoms.get(i), other.atoms.get(j)) {
                (Some(&(na, ma)), Some(&(nb, mb))) => {
                    if na == nb {
                        total += (ma - mb).abs();
                        i += 1;
                        j += 1;
                    } else if na < nb {
                        total += ma;
                        i += 1;
                    } else {
                        total += mb;
                        j += 1;
                    }
                }
                (Some(&(_, ma)), None) => {
                    total += ma;
                    i += 1;
                }
                (None, Some(&(_, mb))) => {
                    total += mb;
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Ok(total)
    }
}

struct TreeWalk<'a> {
    fb: &'a FilterBank,
    prune_eps: f64,
    leaves_visited: u64,
    pruned_mass: f64,
}

impl TreeWalk<'_> {
    fn descend(
        &mut self,
        v: &CoeffVector,
        depth_left: u32,
        numerator: u64,
        visit: &mut impl FnMut(u64, &CoeffVector),
    ) -> Result<()> {
        let mass = v.norm_sq();
        if mass <= self.prune_eps {
            self.pruned_mass += mass;
            return Ok(());
        }
        if depth_left == 0 {
            self.leaves_visited += 1;
            if self.leaves_visited > ENUMERATION_CAP {
                return Err(Error::DepthOverflow {
                    leaves: self.leaves_visited,
                    cap: ENUMERATION_CAP,
                });
            }
            visit(numerator, v);
            return Ok(());
        }
        let n = self.fb.n_channels();
        for digit in 0..n {
            let child = apply_s_star(self.fb, digit, v)?;
            self.descend(
                &child,
                depth_left - 1,
                numerator * n as u64 + digit as u64,
                visit,
            )?;
        }
        Ok(())
    }
}

fn check_cap(fb: &FilterBank, k: u32, prune_eps: f64) -> Result<()> {
    if prune_eps <= 0.0 {
        match (fb.n_channels() as u64).checked_pow(k) {
            Some(l) if l <= ENUMERATION_CAP => Ok(()),
            Some(l) => Err(Error::DepthOverflow {
                leaves: l,
                cap: ENUMERATION_CAP,
            }),
            None => Err(Error::DepthOverflow {
                leaves: u64::MAX,
                cap: ENUMERATION_CAP,
            }),
        }
    } else {
        Ok(())
    }
}

/// Depth-first enumeration of all `N^k` adjoint words, emitting the atom
/// `(x_k(α), ‖S_α* f‖²)` per word.  A subtree is skipped as soon as the mass
/// at its root is ≤ `prune_eps`; children carry exactly the parent's mass
/// between them, so the total discarded mass is the sum of pruned node
/// masses, reported via [`atom_tree_with_stats`].
pub fn atom_tree(fb: &FilterBank, f: &CoeffVector, k: u32, prune_eps: f64) -> Result<AtomicMeasure> {
    atom_tree_with_stats(fb, f, k, prune_eps).map(|(m, _)| m)
}

/// Enumeration statistics: discarded mass and leaves visited.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct TreeStats {
    pub pruned_mass: f64,
    pub leaves_visited: u64,
}

pub fn atom_tree_with_stats(
    fb: &FilterBank,
    f: &CoeffVector,
    k: u32,
    prune_eps: f64,
) -> Result<(AtomicMeasure, TreeStats)> {
    if !(0.0..1.0).contains(&prune_eps) {
        return Err(Error::InvalidParameter(format!(
            "prune_eps {prune_eps} outside [0, 1)"
        )));
    }
    check_cap(fb, k, prune_eps)?;
    let mut atoms: Vec<(u64, f64)> = Vec::new();
    let mut walk = TreeWalk {
        fb,
        prune_eps,
        leaves_visited: 0,
        pruned_mass: 0.0,
    };
    walk.descend(f, k, 0, &mut |num, v| atoms.push((num, v.norm_sq())))?;
    // DFS with ascending digits emits numerators in ascending order
    let measure = AtomicMeasure {
        base: fb.n_channels() as u32,
        depth: k,
        atoms,
    };
    Ok((
        measure,
        TreeStats {
            pruned_mass: walk.pruned_mass,
            leaves_visited: walk.leaves_visited,
        },
    ))
}

/// An atom tree that retains the residual vector `S_α* f` at every leaf, so
/// it can be extended one level at a time.
#[derive(Debug, Clone)]
pub struct AtomTree {
    base: u32,
    depth: u32,
    prune_eps: f64,
    leaves: Vec<(u64, CoeffVector)>,
    pruned_mass: f64,
}

impl AtomTree {
    pub fn build(fb: &FilterBank, f: &CoeffVector, k: u32, prune_eps: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&prune_eps) {
            return Err(Error::InvalidParameter(format!(
                "prune_eps {prune_eps} outside [0, 1)"
            )));
        }
        check_cap(fb, k, prune_eps)?;
        let mut leaves: Vec<(u64, CoeffVector)> = Vec::new();
        let mut walk = TreeWalk {
            fb,
            prune_eps,
            leaves_visited: 0,
            pruned_mass: 0.0,
        };
        walk.descend(f, k, 0, &mut |num, v| leaves.push((num, v.clone())))?;
        Ok(Self {
            base: fb.n_channels() as u32,
            depth: k,
            prune_eps,
            leaves,
            pruned_mass: walk.pruned_mass,
        })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn pruned_mass(&self) -> f64 {
        self.pruned_mass
    }

    pub fn leaves(&self) -> impl Iterator<Item = (u64, &CoeffVector)> + '_ {
        self.leaves.iter().map(|(n, v)| (*n, v))
    }

    /// Extends every retained leaf one level.  Aggregating the children of
    /// each parent reproduces the parent atom (children masses sum to the
    /// parent mass by completeness of the relations).
    pub fn refine(&self, fb: &FilterBank) -> Result<AtomTree> {
        if fb.n_channels() as u32 != self.base {
            return Err(Error::InvalidParameter(format!(
                "bank has {} channels, tree base is {}",
                fb.n_channels(),
                self.base
            )));
        }
        let n = self.base as u64;
        let projected = self.leaves.len() as u64 * n;
        if projected > ENUMERATION_CAP {
            return Err(Error::DepthOverflow {
                leaves: projected,
                cap: ENUMERATION_CAP,
            });
        }
        let mut leaves: Vec<(u64, CoeffVector)> =
            Vec::with_capacity(self.leaves.len() * n as usize);
        let mut pruned = self.pruned_mass;
        for (num, v) in &self.leaves {
            for digit in 0..fb.n_channels() {
                let child = apply_s_star(fb, digit, v)?;
                let mass = child.norm_sq();
                if mass <= self.prune_eps {
                    pruned += mass;
                    continue;
                }
                leaves.push((num * n + digit as u64, child));
            }
        }
        Ok(AtomTree {
            base: self.base,
            depth: self.depth + 1,
            prune_eps: self.prune_eps,
            leaves,
            pruned_mass: pruned,
        })
    }

    pub fn measure(&self) -> AtomicMeasure {
        AtomicMeasure {
            base: self.base,
            depth: self.depth,
            atoms: self
                .leaves
                .iter()
                .map(|(n, v)| (*n, v.norm_sq()))
                .filter(|&(_, m)| m > 0.0)
                .collect(),
        }
    }
}

/// `Σ_atoms mass · e^{i t x}` for each requested `t`; the convention is
/// `e^{itx}` with no 2π factor.
pub fn fourier_of_atoms(mu: &AtomicMeasure, ts: &[f64]) -> Vec<Complex64> {
    ts.iter()
        .map(|&t| {
            mu.addresses()
                .map(|(addr, m)| Complex64::from_polar(m, t * addr.value()))
                .sum()
        })
        .collect()
}

/// The certified truncation bound `|t|·N^{-k}`, valid for unit vectors.
pub fn fourier_error_bound(t: f64, k: u32, base: u32) -> f64 {
    t.abs() * (base as f64).powi(-(k as i32))
}

/// `F(x) = Σ_{position ≤ x} mass`, the closed-interval distribution
/// function; negative `x` yields 0.
pub fn cdf(mu: &AtomicMeasure, xs: &[f64]) -> Vec<f64> {
    let positions: Vec<f64> = mu.addresses().map(|(a, _)| a.value()).collect();
    let mut prefix: Vec<f64> = Vec::with_capacity(positions.len() + 1);
    prefix.push(0.0);
    for (_, m) in mu.atoms() {
        prefix.push(prefix.last().unwrap() + m);
    }
    xs.iter()
        .map(|&x| {
            let count = positions.partition_point(|&p| p <= x);
            prefix[count]
        })
        .collect()
}

/// `Σ mass · ψ(x_atom)`, with the certified bound `N^{-k} · ∫|t ψ̂(t)| dt`
/// when the caller supplies that moment.
pub fn integrate(
    mu: &AtomicMeasure,
    psi: impl Fn(f64) -> f64,
    l1_fourier_moment: Option<f64>,
) -> (f64, Option<f64>) {
    let value = mu
        .addresses()
        .map(|(a, m)| m * psi(a.value()))
        .fold(0.0, |a, x| a + x);
    let bound =
        l1_fourier_moment.map(|mom| mom * (mu.base() as f64).powi(-(mu.depth() as i32)));
    (value, bound)
}

/// Total-variation residual of the one-step self-similarity identity at
/// depth k: compares `Σ_j (σ_j)_* μ_{S_j* f}^{(k-1)}` against `μ_f^{(k)}`.
pub fn refinement_residual(fb: &FilterBank, f: &CoeffVector, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "refinement residual needs depth ≥ 1".into(),
        ));
    }
    let lhs = atom_tree(fb, f, k, 0.0)?;
    let mut combined: Vec<(u64, f64)> = Vec::new();
    for j in 0..fb.n_channels() {
        let fj = apply_s_star(fb, j, f)?;
        let mu_j = atom_tree(fb, &fj, k - 1, 0.0)?;
        let pushed = mu_j.prepended(j as u8)?;
        combined.extend(pushed.atoms());
    }
    let rhs = AtomicMeasure::from_atoms(fb.n_channels() as u32, k, combined)?;
    lhs.tv_distance(&rhs)
}
