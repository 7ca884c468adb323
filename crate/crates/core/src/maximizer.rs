//! Maximum diversity and the distributions attaining it.
//!
//! For symmetric `Z` a single distribution maximizes `D_q` for every `q`, and
//! the maximum equals the largest magnitude `|Z_B|` over subsets `B` whose
//! principal submatrix admits a nonnegative weighting ("feasible" subsets).
//! The maximizing distributions are exactly the normalized nonnegative
//! weightings on the feasible subsets of largest magnitude.
//!
//! [`maximize_exhaustive`] enumerates all `2^n - 1` subsets. When `Z` is
//! ultrametric, strictly diagonally dominant with unit diagonal, or positive
//! semidefinite with a nonnegative weighting, [`maximize_fast_path`] answers
//! from the full matrix alone.

use rayon::prelude::*;
use serde::Serialize;

use crate::diversity::{ordinariness_on_support, Distribution};
use crate::error::{Error, Result};
use crate::linalg::{
    check_index_set, find_nonnegative_weighting, is_positive_definite, is_positive_semidefinite,
    is_strictly_diagonally_dominant, is_ultrametric, max_min_weighting, min_eigenvalue,
    nonnegative_weighting_is_unique, solve_weighting_space, SimilarityMatrix, WeightingSolution,
    SOLVE_TOLERANCE,
};

/// Largest `n` accepted by [`maximize_exhaustive`].
pub const DEFAULT_SPECIES_CAP: usize = 30;

/// Relative tolerance under which two magnitudes count as tied.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Relative spread of `(Zp)_i` on the support accepted as constant.
pub const INVARIANCE_TOLERANCE: f64 = 1e-9;

/// A subset whose principal submatrix has a nonnegative weighting.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibleSubset {
    pub indices: Vec<usize>,
    pub magnitude: f64,
    pub weighting_space: WeightingSolution,
}

impl FeasibleSubset {
    /// The nonnegative weighting found for this subset.
    pub fn representative(&self) -> &[f64] {
        self.weighting_space
            .nonnegative_representative
            .as_deref()
            .expect("feasible subsets carry a nonnegative weighting")
    }

    /// True when the weighting space has positive dimension, so the subset
    /// may generate a continuum of maximizers.
    pub fn has_kernel(&self) -> bool {
        self.weighting_space.kernel_dimension() > 0
    }

    /// The distribution obtained by normalizing the representative weighting.
    pub fn distribution(&self, n: usize) -> Result<Distribution> {
        normalize_weighting(self.representative(), &self.indices, n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exhaustive,
    Ultrametric,
    DiagonallyDominant,
    Semidefinite,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaximizationResult {
    pub dmax: f64,
    pub winners: Vec<FeasibleSubset>,
    pub sample_maximizer: Distribution,
    pub full_support_exists: bool,
    pub all_maximizers_full_support: bool,
    /// Set only when uniqueness of the maximizing distribution was proven.
    pub unique_maximizer: bool,
    pub method: Method,
    /// Number of feasible subsets seen (1 on the fast path).
    pub feasible_subsets: usize,
}

/// Evidence behind [`full_support_diagnostics`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FullSupportDiagnostics {
    pub exists_full_support_maximizer: bool,
    pub all_maximizers_full_support: bool,
    pub min_eigenvalue: f64,
    pub positive_semidefinite: bool,
    pub positive_definite: bool,
    /// Weighting on the full matrix maximizing its smallest entry.
    pub best_weighting: Option<Vec<f64>>,
    pub weighting_floor: Option<f64>,
}

/// `w / sum(w)` placed on `indices` inside `n` species.
///
/// Entries in `[-SOLVE_TOLERANCE, 0)` are treated as zero.
pub fn normalize_weighting(w: &[f64], indices: &[usize], n: usize) -> Result<Distribution> {
    check_index_set(n, indices)?;
    if w.len() != indices.len() {
        return Err(Error::DimensionMismatch {
            expected: indices.len(),
            found: w.len(),
        });
    }
    if let Some(&bad) = w.iter().find(|&&x| !(x >= -SOLVE_TOLERANCE)) {
        return Err(Error::InvalidDistribution(format!(
            "weighting entry {bad} is negative"
        )));
    }
    let total: f64 = w.iter().map(|x| x.max(0.0)).sum();
    if total <= 0.0 {
        return Err(Error::ZeroWeighting);
    }
    let mut probs = vec![0.0; n];
    for (&i, &x) in indices.iter().zip(w) {
        probs[i] = x.max(0.0) / total;
    }
    Ok(Distribution::from_probs_unchecked(probs))
}

/// Whether `(Zp)_i` is constant over the support of `p`, i.e. whether the
/// diversity profile of `p` is flat.
pub fn check_invariant(z: &SimilarityMatrix, p: &Distribution) -> Result<bool> {
    if z.n() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: z.n(),
            found: p.n(),
        });
    }
    let zp = ordinariness_on_support(z, p.probs(), p.support());
    let max = zp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = zp.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(max - min <= INVARIANCE_TOLERANCE * max)
}

/// Fast path when applicable, exhaustive enumeration otherwise.
pub fn maximize(z: &SimilarityMatrix) -> Result<MaximizationResult> {
    match maximize_fast_path(z)? {
        Some(result) => Ok(result),
        None => maximize_exhaustive(z),
    }
}

pub fn maximize_exhaustive(z: &SimilarityMatrix) -> Result<MaximizationResult> {
    maximize_exhaustive_capped(z, DEFAULT_SPECIES_CAP)
}

#[derive(Default)]
struct Winners {
    best: f64,
    subsets: Vec<FeasibleSubset>,
    feasible: usize,
}

impl Winners {
    fn ties(a: f64, b: f64) -> bool {
        (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs())
    }

    fn push(mut self, subset: FeasibleSubset) -> Self {
        self.feasible += 1;
        let m = subset.magnitude;
        if self.subsets.is_empty() || m > self.best && !Self::ties(m, self.best) {
            self.best = m;
            self.subsets.retain(|s| Self::ties(s.magnitude, m));
            self.subsets.push(subset);
        } else if Self::ties(m, self.best) {
            self.best = self.best.max(m);
            self.subsets.push(subset);
        }
        self
    }

    fn merge(self, other: Self) -> Self {
        let feasible = self.feasible + other.feasible;
        let mut merged = other.subsets.into_iter().fold(
            Winners {
                feasible: 0,
                ..self
            },
            Winners::push,
        );
        merged.feasible = feasible;
        merged
    }
}

fn evaluate_subset(z: &SimilarityMatrix, mask: u64) -> Result<Option<FeasibleSubset>> {
    let indices: Vec<usize> = (0..z.n()).filter(|&i| mask >> i & 1 == 1).collect();
    let ws = solve_weighting_space(z, &indices)?;
    if ws.particular.is_none() {
        return Ok(None);
    }
    let ws = ws.with_nonnegative_representative()?;
    let Some(rep) = ws.nonnegative_representative.as_ref() else {
        return Ok(None);
    };
    let magnitude: f64 = rep.iter().sum();
    Ok(Some(FeasibleSubset {
        indices,
        magnitude,
        weighting_space: ws,
    }))
}

/// Enumerates every nonempty subset, keeping all feasible subsets of maximal
/// magnitude (ties within [`TIE_TOLERANCE`] are all retained).
pub fn maximize_exhaustive_capped(z: &SimilarityMatrix, cap: usize) -> Result<MaximizationResult> {
    z.require_symmetric()?;
    let n = z.n();
    if n > cap.min(63) {
        return Err(Error::TooManySpecies { n, cap: cap.min(63) });
    }

    let found = (1u64..1u64 << n)
        .into_par_iter()
        .map(|mask| evaluate_subset(z, mask))
        .try_fold(Winners::default, |acc, r| {
            r.map(|s| match s {
                Some(s) => acc.push(s),
                None => acc,
            })
        })
        .try_reduce(Winners::default, |a, b| Ok(a.merge(b)))?;

    let mut winners = found.subsets;
    if winners.is_empty() {
        // every singleton {i} has weighting 1 / Z_ii > 0
        return Err(Error::Numerical("no feasible subset found".into()));
    }
    winners.sort_by(|a, b| {
        a.indices
            .len()
            .cmp(&b.indices.len())
            .then_with(|| a.indices.cmp(&b.indices))
    });
    let dmax = winners
        .iter()
        .map(|w| w.magnitude)
        .fold(f64::NEG_INFINITY, f64::max);
    let sample = winners
        .iter()
        .min_by(|a, b| a.indices.cmp(&b.indices))
        .expect("nonempty")
        .distribution(n)?;

    let unique = winners_share_one_distribution(&winners, n)?;
    let diagnostics = full_support_diagnostics(z)?;
    Ok(MaximizationResult {
        dmax,
        winners,
        sample_maximizer: sample,
        full_support_exists: diagnostics.exists_full_support_maximizer,
        all_maximizers_full_support: diagnostics.all_maximizers_full_support,
        unique_maximizer: unique,
        method: Method::Exhaustive,
        feasible_subsets: found.feasible,
    })
}

fn winners_share_one_distribution(winners: &[FeasibleSubset], n: usize) -> Result<bool> {
    let mut first: Option<Distribution> = None;
    for w in winners {
        if !nonnegative_weighting_is_unique(&w.weighting_space)? {
            return Ok(false);
        }
        let d = w.distribution(n)?;
        match &first {
            None => first = Some(d),
            Some(f) => {
                let gap = f
                    .probs()
                    .iter()
                    .zip(d.probs())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                if gap > 10.0 * SOLVE_TOLERANCE {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Polynomial-time answer for matrices where the full set is known to be
/// optimal. `Ok(None)` means no fast-path condition holds.
pub fn maximize_fast_path(z: &SimilarityMatrix) -> Result<Option<MaximizationResult>> {
    z.require_symmetric()?;
    let method = if is_ultrametric(z) {
        Method::Ultrametric
    } else if z.has_unit_diagonal() && is_strictly_diagonally_dominant(z) {
        Method::DiagonallyDominant
    } else if is_positive_semidefinite(z) {
        Method::Semidefinite
    } else {
        return Ok(None);
    };

    let n = z.n();
    let all: Vec<usize> = (0..n).collect();
    let ws = solve_weighting_space(z, &all)?;
    let Some(representative) = find_nonnegative_weighting(&ws)? else {
        return Ok(None);
    };
    let diagnostics = full_support_diagnostics(z)?;
    let magnitude: f64 = representative.iter().sum();
    let winner = FeasibleSubset {
        indices: all.clone(),
        magnitude,
        weighting_space: WeightingSolution {
            nonnegative_representative: Some(representative),
            ..ws
        },
    };
    Ok(Some(MaximizationResult {
        dmax: magnitude,
        sample_maximizer: winner.distribution(n)?,
        winners: vec![winner],
        full_support_exists: diagnostics.exists_full_support_maximizer,
        all_maximizers_full_support: diagnostics.all_maximizers_full_support,
        unique_maximizer: diagnostics.all_maximizers_full_support,
        method,
        feasible_subsets: 1,
    }))
}

/// Decides whether some (resp. every) maximizing distribution has full support.
///
/// Some maximizer has full support iff `Z` is positive semidefinite and has a
/// positive weighting; every maximizer does iff `Z` is positive definite with
/// a positive weighting.
pub fn full_support_diagnostics(z: &SimilarityMatrix) -> Result<FullSupportDiagnostics> {
    z.require_symmetric()?;
    let all: Vec<usize> = (0..z.n()).collect();
    let ws = solve_weighting_space(z, &all)?;
    let best = max_min_weighting(&ws)?;
    let positive = best.as_ref().is_some_and(|(_, floor)| *floor > SOLVE_TOLERANCE);
    let psd = is_positive_semidefinite(z);
    let pd = is_positive_definite(z);
    let (best_weighting, weighting_floor) = match best {
        Some((w, f)) => (Some(w), Some(f)),
        None => (None, None),
    };
    Ok(FullSupportDiagnostics {
        exists_full_support_maximizer: psd && positive,
        all_maximizers_full_support: pd && positive,
        min_eigenvalue: min_eigenvalue(z),
        positive_semidefinite: psd,
        positive_definite: pd,
        best_weighting,
        weighting_floor,
    })
}
