//! Classical scalar-weight IFS machinery on the line: cascade
//! approximation of the fixed-point measure, chaos-game sampling, exact
//! moment recursion, and self-similarity residuals.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

use crate::nadic::ENUMERATION_CAP;

/// Atoms closer than this are merged by [`PointMassCloud::new`].
pub const MERGE_TOL: f64 = 1e-14;

/// `x ↦ a·x + b` with `|a| < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub a: f64,
    pub b: f64,
}

impl AffineMap {
    pub fn apply(&self, x: f64) -> f64 {
        self.a * x + self.b
    }

    /// The unique fixed point `b / (1 − a)`.
    pub fn fixed_point(&self) -> f64 {
        self.b / (1.0 - self.a)
    }
}

/// A contractive affine IFS with probability weights.  Zero weights are
/// admitted (they prune branches); the weights must sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineIFS {
    maps: Vec<AffineMap>,
    weights: Vec<f64>,
}

impl AffineIFS {
    pub fn new(maps: Vec<AffineMap>, weights: Vec<f64>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidParameter("IFS needs at least one map".into()));
        }
        if maps.len() != weights.len() {
            return Err(Error::InvalidParameter(format!(
                "{} maps but {} weights",
                maps.len(),
                weights.len()
            )));
        }
        for m in &maps {
            if !(m.a.is_finite() && m.b.is_finite() && m.a.abs() < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "map x ↦ {}·x + {} is not a contraction",
                    m.a, m.b
                )));
            }
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
            return Err(Error::InvalidParameter("weights must be ≥ 0".into()));
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(Self { maps, weights })
    }

    pub fn n_maps(&self) -> usize {
        self.maps.len()
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Largest contraction ratio `max |a_i|`.
    pub fn contraction(&self) -> f64 {
        self.maps.iter().map(|m| m.a.abs()).fold(0.0, f64::max)
    }

    /// Smallest interval `[L,U]` with `σ_i([L,U]) ⊆ [L,U]` for every map,
    /// solved from the endpoint equations by iterating the interval hull
    /// map to its fixed point starting from the hull of the map fixed
    /// points.
    pub fn invariant_interval(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for m in &self.maps {
            lo = lo.min(m.fixed_point());
            hi = hi.max(m.fixed_point());
        }
        // monotone under the hull map; geometric convergence at rate c
        for _ in 0..512 {
            let mut nlo = f64::INFINITY;
            let mut nhi = f64::NEG_INFINITY;
            for m in &self.maps {
                nlo = nlo.min(m.apply(lo).min(m.apply(hi)));
                nhi = nhi.max(m.apply(lo).max(m.apply(hi)));
            }
            let nlo = nlo.min(lo);
            let nhi = nhi.max(hi);
            if nlo == lo && nhi == hi {
                break;
            }
            lo = nlo;
            hi = nhi;
        }
        (lo, hi)
    }
}

/// A finite nonnegative atomic measure on the line, sorted by position;
/// atoms within [`MERGE_TOL`] of each other are merged.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMassCloud {
    atoms: Vec<(f64, f64)>,
}

impl PointMassCloud {
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        for &(x, m) in &atoms {
            if !x.is_finite() || !m.is_finite() || m < 0.0 {
                return Err(Error::InvalidParameter(format!("bad atom ({x}, {m})")));
            }
        }
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (x, m) in atoms {
            match merged.last_mut() {
                Some((px, pm)) if (x - *px).abs() <= MERGE_TOL => *pm += m,
                _ => merged.push((x, m)),
            }
        }
        merged.retain(|&(_, m)| m > 0.0);
        Ok(Self { atoms: merged })
    }

    pub fn dirac(x: f64) -> Self {
        Self {
            atoms: vec![(x, 1.0)],
        }
    }

    pub fn n_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.atoms.iter().copied()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|&(_, m)| m).fold(0.0, |a, x| a + x)
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|&(x, m)| x * m).sum::<f64>() / self.total_mass()
    }
}

/// One application of the weighted transfer step: atoms move through every
/// positive-weight map and masses multiply by the weights.
pub fn hutchinson_step(ifs: &AffineIFS, cloud: &PointMassCloud) -> Result<PointMassCloud> {
    let mut atoms = Vec::with_capacity(cloud.n_atoms() * ifs.n_maps());
    for (map, &w) in ifs.maps().iter().zip(ifs.weights()) {
        if w == 0.0 {
            continue;
        }
        for (x, m) in cloud.atoms() {
            atoms.push((map.apply(x), w * m));
        }
    }
    PointMassCloud::new(atoms)
}

/// The k-th transfer iterate of `δ_seed`: atoms at all k-fold map
/// compositions of the seed, masses the weight products.
pub fn cascade(ifs: &AffineIFS, k: u32, seed: f64) -> Result<PointMassCloud> {
    if !seed.is_finite() {
        return Err(Error::InvalidParameter("seed must be finite".into()));
    }
    let mut cloud = PointMassCloud::dirac(seed);
    let live = ifs.weights().iter().filter(|&&w| w > 0.0).count() as u64;
    for _ in 0..k {
        let projected = cloud.n_atoms() as u64 * live;
        if projected > ENUMERATION_CAP {
            return Err(Error::DepthOverflow {
                leaves: projected,
                cap: ENUMERATION_CAP,
            });
        }
        cloud = hutchinson_step(ifs, &cloud)?;
    }
    Ok(cloud)
}

/// SplitMix64: tiny splittable-stream generator; a fixed seed pins the
/// entire stream, which is what batch reproducibility needs.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Empirical summary of a chaos-game run.
#[derive(Debug, Clone, Serialize)]
pub struct ChaosGameStats {
    pub mean: f64,
    pub variance: f64,
    pub n_samples: u64,
    pub burn_in: u64,
    pub rng_seed: u64,
    /// Bin counts over the invariant interval when requested.
    pub histogram: Option<Vec<u64>>,
}

/// Random iteration `x ← σ_J(x)`, `J ~ weights`; the empirical law
/// converges to the fixed-point measure.  Same seed, same stream.
pub fn chaos_game(
    ifs: &AffineIFS,
    n_samples: u64,
    burn_in: u64,
    rng_seed: u64,
    histogram_bins: Option<usize>,
) -> Result<ChaosGameStats> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be > 0".into()));
    }
    let mut cum = Vec::with_capacity(ifs.n_maps());
    let mut acc = 0.0;
    for &w in ifs.weights() {
        acc += w;
        cum.push(acc);
    }
    let (lo, hi) = ifs.invariant_interval();
    let width = (hi - lo).max(f64::MIN_POSITIVE);
    let mut hist = histogram_bins.map(|b| vec![0u64; b.max(1)]);

    let mut rng = SplitMix64::new(rng_seed);
    let mut x = 0.0f64;
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    for step in 0..(burn_in + n_samples) {
        let u = rng.next_f64();
        let j = cum.partition_point(|&c| c <= u).min(ifs.n_maps() - 1);
        x = ifs.maps()[j].apply(x);
        if step < burn_in {
            continue;
        }
        sum += x;
        sum_sq += x * x;
        if let Some(h) = hist.as_mut() {
            let bins = h.len();
            let idx = (((x - lo) / width) * bins as f64).floor();
            let idx = (idx.max(0.0) as usize).min(bins - 1);
            h[idx] += 1;
        }
    }
    let n = n_samples as f64;
    let mean = sum / n;
    Ok(ChaosGameStats {
        mean,
        variance: (sum_sq / n - mean * mean).max(0.0),
        n_samples,
        burn_in,
        rng_seed,
        histogram: hist,
    })
}

/// Moments `m_r = ∫ x^r dμ` for `r = 0..=max_order` via the triangular
/// recursion obtained by pushing `x^r` through the self-similarity
/// identity:
///
/// `m_r · (1 − Σ_i p_i a_i^r) = Σ_i p_i Σ_{s<r} C(r,s) a_i^s b_i^{r−s} m_s`
///
/// The denominator stays positive because every `|a_i| < 1`.
pub fn solve_moments(ifs: &AffineIFS, max_order: u32) -> Vec<f64> {
    let mut moments = Vec::with_capacity(max_order as usize + 1);
    moments.push(1.0);
    for r in 1..=max_order {
        let mut rhs = 0.0f64;
        let mut denom_sub = 0.0f64;
        for (map, &p) in ifs.maps().iter().zip(ifs.weights()) {
            let mut inner = 0.0f64;
            for s in 0..r {
                inner += binomial(r, s)
                    * map.a.powi(s as i32)
                    * map.b.powi((r - s) as i32)
                    * moments[s as usize];
            }
            rhs += p * inner;
            denom_sub += p * map.a.powi(r as i32);
        }
        moments.push(rhs / (1.0 - denom_sub));
    }
    moments
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Exact 1-Wasserstein distance between finite clouds on the line via the
/// CDF-difference integral.  Total masses must agree.
pub fn wasserstein1(a: &PointMassCloud, b: &PointMassCloud) -> Result<f64> {
    let (ta, tb) = (a.total_mass(), b.total_mass());
    if (ta - tb).abs() > 1e-9 * ta.max(tb).max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "total masses differ: {ta} vs {tb}"
        )));
    }
    let mut events: Vec<(f64, f64)> = a
        .atoms()
        .chain(b.atoms().map(|(x, m)| (x, -m)))
        .collect();
    events.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    let mut dist = 0.0f64;
    let mut cdf_gap = 0.0f64;
    let mut prev = match events.first() {
        Some(&(x, _)) => x,
        None => return Ok(0.0),
    };
    for (x, delta) in events {
        dist += cdf_gap.abs() * (x - prev);
        cdf_gap += delta;
        prev = x;
    }
    Ok(dist)
}

/// `W₁(cloud, T cloud)` where `T` is the weighted transfer step: how far
/// the cloud is from the self-similar fixed point, in transport distance.
pub fn self_similarity_residual(ifs: &AffineIFS, cloud: &PointMassCloud) -> Result<f64> {
    wasserstein1(cloud, &hutchinson_step(ifs, cloud)?)
}

/// The depth-k interval cover of the attractor.
#[derive(Debug, Clone, Serialize)]
pub struct AttractorCover {
    pub invariant_interval: (f64, f64),
    /// All `σ_{i_1}∘…∘σ_{i_k}([L,U])`, sorted by left endpoint.
    pub intervals: Vec<(f64, f64)>,
    pub max_diameter: f64,
    /// True when no pair of intervals intersects beyond endpoint touching.
    pub non_overlapping: bool,
}

/// Enumerates all depth-k images of the invariant interval and checks the
/// cover for interior overlaps; endpoint touching is accepted because the
/// partition model uses half-open intervals.
pub fn attractor_cover(ifs: &AffineIFS, k: u32) -> Result<AttractorCover> {
    if k < 1 {
        return Err(Error::InvalidParameter("cover depth must be ≥ 1".into()));
    }
    match (ifs.n_maps() as u64).checked_pow(k) {
        Some(n) if n <= ENUMERATION_CAP => {}
        _ => {
            return Err(Error::DepthOverflow {
                leaves: u64::MAX,
                cap: ENUMERATION_CAP,
            })
        }
    }
    let (lo, hi) = ifs.invariant_interval();
    let mut intervals = vec![(lo, hi)];
    for _ in 0..k {
        let mut next = Vec::with_capacity(intervals.len() * ifs.n_maps());
        for m in ifs.maps() {
            for &(a, b) in &intervals {
                let (p, q) = (m.apply(a), m.apply(b));
                next.push((p.min(q), p.max(q)));
            }
        }
        intervals = next;
    }
    intervals.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(a.1.partial_cmp(&b.1).unwrap())
    });
    let max_diameter = intervals
        .iter()
        .map(|&(a, b)| b - a)
        .fold(0.0f64, f64::max);
    let touch_tol = 1e-12 * (hi - lo).abs().max(1.0);
    let mut non_overlapping = true;
    let mut reach = f64::NEG_INFINITY;
    for &(a, b) in &intervals {
        if a < reach - touch_tol {
            non_overlapping = false;
            break;
        }
        reach = reach.max(b);
    }
    Ok(AttractorCover {
        invariant_interval: (lo, hi),
        intervals,
        max_diameter,
        non_overlapping,
    })
}

/// The middle-third Cantor IFS with equal weights.
pub fn cantor_ifs() -> AffineIFS {
    AffineIFS::new(
        vec![
            AffineMap {
                a: 1.0 / 3.0,
                b: 0.0,
            },
            AffineMap {
                a: 1.0 / 3.0,
                b: 2.0 / 3.0,
            },
        ],
        vec![0.5, 0.5],
    )
    .expect("valid IFS")
}

/// The dyadic halving IFS whose fixed point is Lebesgue measure on `[0,1]`.
pub fn dyadic_ifs() -> AffineIFS {
    AffineIFS::new(
        vec![AffineMap { a: 0.5, b: 0.0 }, AffineMap { a: 0.5, b: 0.5 }],
        vec![0.5, 0.5],
    )
    .expect("valid IFS")
}

/// The base-N subdivision maps `σ_j(x) = (x+j)/N` with caller weights.
pub fn nadic_ifs(n: u32, weights: Vec<f64>) -> Result<AffineIFS> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("base {n} < 2")));
    }
    let maps = (0..n)
        .map(|j| AffineMap {
            a: 1.0 / n as f64,
            b: j as f64 / n as f64,
        })
        .collect();
    AffineIFS::new(maps, weights)
}
