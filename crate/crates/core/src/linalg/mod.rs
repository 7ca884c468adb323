//! Dense linear algebra on small similarity matrices.
//!
//! A *weighting* on a square matrix `M` is a vector `w` with `M w = (1, ..., 1)`.
//! When `M` is symmetric and has at least one weighting, `sum(w)` does not
//! depend on which weighting is chosen; that common value is the *magnitude*
//! of `M`. The routines here compute the full affine space of weightings on a
//! principal submatrix, search it for nonnegative members, and classify
//! matrices (semidefinite, ultrametric, diagonally dominant).

mod lp;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute residual tolerance for weighting equations on matrices with
/// entries in `[0, 1]`. Scaled by the largest entry for other matrices.
pub const SOLVE_TOLERANCE: f64 = 1e-9;

/// Relative pivot threshold used to declare numerical rank.
pub const PIVOT_THRESHOLD: f64 = 1e-10;

/// Relative eigenvalue floor for the semidefinite test.
pub const EIGEN_FLOOR: f64 = 1e-9;

const LP_PIVOT_LIMIT: usize = 10_000;

/// A square matrix of nonnegative similarity coefficients with positive diagonal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    n: usize,
    entries: Vec<f64>,
    symmetric: bool,
}

impl SimilarityMatrix {
    /// Builds a matrix from its rows, validating the standing hypotheses.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut entries = Vec::with_capacity(n * n);
        for (row, values) in rows.iter().enumerate() {
            if values.len() != n {
                return Err(Error::NotSquare {
                    row,
                    len: values.len(),
                    expected: n,
                });
            }
            entries.extend_from_slice(values);
        }
        Self::from_row_major(n, entries)
    }

    pub fn from_row_major(n: usize, mut entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        for (k, &value) in entries.iter().enumerate() {
            let (row, col) = (k / n, k % n);
            if !value.is_finite() {
                return Err(Error::NonFinite { row, col, value });
            }
            if value < 0.0 {
                return Err(Error::NegativeEntry { row, col, value });
            }
            if row == col && value <= 0.0 {
                return Err(Error::NonPositiveDiagonal { index: row, value });
            }
        }
        // -0.0 would break the bitwise symmetry check
        for v in entries.iter_mut().filter(|v| **v == 0.0) {
            *v = 0.0;
        }
        let symmetric = first_asymmetry(n, &entries).is_none();
        Ok(Self {
            n,
            entries,
            symmetric,
        })
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "identity matrix needs at least one species");
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        Self {
            n,
            entries,
            symmetric: true,
        }
    }

    /// Replaces each off-diagonal pair by its mean, provided the pair differs
    /// by at most `tolerance`. The result is bit-exactly symmetric.
    pub fn symmetrized(&self, tolerance: f64) -> Result<Self> {
        let n = self.n;
        let mut entries = self.entries.clone();
        for i in 0..n {
            for j in (i + 1)..n {
                let (upper, lower) = (self.get(i, j), self.get(j, i));
                if (upper - lower).abs() > tolerance {
                    return Err(Error::NotSymmetric {
                        row: i,
                        col: j,
                        upper,
                        lower,
                    });
                }
                let mean = 0.5 * (upper + lower);
                entries[i * n + j] = mean;
                entries[j * n + i] = mean;
            }
        }
        Ok(Self {
            n,
            entries,
            symmetric: true,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// First `(i, j)` with `i < j` and `Z[i][j] != Z[j][i]`, if any.
    pub fn asymmetry(&self) -> Option<(usize, usize)> {
        first_asymmetry(self.n, &self.entries)
    }

    pub(crate) fn require_symmetric(&self) -> Result<()> {
        match self.asymmetry() {
            None => Ok(()),
            Some((row, col)) => Err(Error::NotSymmetric {
                row,
                col,
                upper: self.get(row, col),
                lower: self.get(col, row),
            }),
        }
    }

    pub fn has_unit_diagonal(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i) == 1.0)
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        self.entries
            .chunks(self.n)
            .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// The principal submatrix on `indices` (in the given order).
    pub fn submatrix(&self, indices: &[usize]) -> Result<Self> {
        check_index_set(self.n, indices)?;
        let k = indices.len();
        let mut entries = Vec::with_capacity(k * k);
        for &i in indices {
            for &j in indices {
                entries.push(self.get(i, j));
            }
        }
        let symmetric = first_asymmetry(k, &entries).is_none();
        Ok(Self {
            n: k,
            entries,
            symmetric,
        })
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        self.entries
            .chunks(self.n)
            .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

fn first_asymmetry(n: usize, entries: &[f64]) -> Option<(usize, usize)> {
    for i in 0..n {
        for j in (i + 1)..n {
            if entries[i * n + j].to_bits() != entries[j * n + i].to_bits() {
                return Some((i, j));
            }
        }
    }
    None
}

pub(crate) fn check_index_set(n: usize, indices: &[usize]) -> Result<()> {
    if indices.is_empty() {
        return Err(Error::InvalidIndexSet("index set is empty".into()));
    }
    let mut seen = vec![false; n];
    for &i in indices {
        if i >= n {
            return Err(Error::InvalidIndexSet(format!(
                "index {i} out of range for {n} species"
            )));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidIndexSet(format!("index {i} repeated")));
        }
    }
    Ok(())
}

/// The affine space of weightings on a principal submatrix `Z_B`.
///
/// Every weighting is `particular + sum_k c_k * nullspace_basis[k]`. When
/// `particular` is absent the system `Z_B w = 1` is inconsistent and `Z_B`
/// has no weighting at all.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightingSolution {
    pub subset: Vec<usize>,
    pub particular: Option<Vec<f64>>,
    pub nullspace_basis: Vec<Vec<f64>>,
    pub nonnegative_representative: Option<Vec<f64>>,
    pub magnitude: Option<f64>,
}

impl WeightingSolution {
    pub fn has_weighting(&self) -> bool {
        self.particular.is_some()
    }

    /// Dimension of the weighting space (zero for a unique weighting).
    pub fn kernel_dimension(&self) -> usize {
        self.nullspace_basis.len()
    }

    /// Evaluates `particular + sum_k coords[k] * nullspace_basis[k]`.
    pub fn point(&self, coords: &[f64]) -> Option<Vec<f64>> {
        let mut w = self.particular.clone()?;
        for (c, v) in coords.iter().zip(&self.nullspace_basis) {
            for (wi, vi) in w.iter_mut().zip(v) {
                *wi += c * vi;
            }
        }
        Some(w)
    }

    /// Fills `nonnegative_representative` by running the feasibility search.
    pub fn with_nonnegative_representative(mut self) -> Result<Self> {
        self.nonnegative_representative = find_nonnegative_weighting(&self)?;
        Ok(self)
    }
}

/// Computes a particular solution and a kernel basis of `Z_B w = 1`.
///
/// Rank is decided by complete-pivoting Gauss-Jordan elimination; pivots below
/// `PIVOT_THRESHOLD` times the largest entry of `Z_B` count as zero. A
/// rank-deficient `Z_B` is a normal outcome, not an error.
pub fn solve_weighting_space(z: &SimilarityMatrix, subset: &[usize]) -> Result<WeightingSolution> {
    check_index_set(z.n(), subset)?;
    let k = subset.len();
    let mut a: Vec<f64> = Vec::with_capacity(k * k);
    for &i in subset {
        for &j in subset {
            a.push(z.get(i, j));
        }
    }
    let original = a.clone();
    let scale = original.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let tolerance = residual_tolerance(scale);

    let mut rhs = vec![1.0; k];
    let mut col_of_pivot: Vec<usize> = Vec::with_capacity(k);
    let mut free_col = vec![true; k];
    let threshold = PIVOT_THRESHOLD * scale;

    for r in 0..k {
        let mut best = (0.0, r, 0);
        for i in r..k {
            for j in (0..k).filter(|&j| free_col[j]) {
                let v = a[i * k + j].abs();
                if v > best.0 {
                    best = (v, i, j);
                }
            }
        }
        let (pivot_abs, pi, pj) = best;
        if pivot_abs <= threshold {
            break;
        }
        if pi != r {
            for j in 0..k {
                a.swap(r * k + j, pi * k + j);
            }
            rhs.swap(r, pi);
        }
        let pivot = a[r * k + pj];
        for j in 0..k {
            a[r * k + j] /= pivot;
        }
        rhs[r] /= pivot;
        for i in (0..k).filter(|&i| i != r) {
            let factor = a[i * k + pj];
            if factor != 0.0 {
                for j in 0..k {
                    a[i * k + j] -= factor * a[r * k + j];
                }
                rhs[i] -= factor * rhs[r];
            }
        }
        free_col[pj] = false;
        col_of_pivot.push(pj);
    }

    let mut particular = vec![0.0; k];
    for (r, &c) in col_of_pivot.iter().enumerate() {
        particular[c] = rhs[r];
    }
    let nullspace_basis: Vec<Vec<f64>> = (0..k)
        .filter(|&f| free_col[f])
        .map(|f| {
            let mut v = vec![0.0; k];
            v[f] = 1.0;
            for (r, &c) in col_of_pivot.iter().enumerate() {
                v[c] = -a[r * k + f];
            }
            v
        })
        .collect();

    let residual = max_residual(&original, k, &particular, 1.0);
    let particular = (residual <= tolerance).then_some(particular);
    let magnitude = particular.as_ref().map(|w| w.iter().sum());
    Ok(WeightingSolution {
        subset: subset.to_vec(),
        particular,
        nullspace_basis,
        nonnegative_representative: None,
        magnitude,
    })
}

fn residual_tolerance(scale: f64) -> f64 {
    SOLVE_TOLERANCE * scale.max(1.0)
}

/// `max_i |(M x)_i - target|` for a row-major `k x k` matrix.
fn max_residual(m: &[f64], k: usize, x: &[f64], target: f64) -> f64 {
    m.chunks(k)
        .map(|row| (row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - target).abs())
        .fold(0.0, f64::max)
}

/// Searches the weighting space for a member with all entries nonnegative.
///
/// With a trivial kernel this is a sign check on the unique weighting.
/// Otherwise a phase-one simplex over the kernel coordinates decides
/// feasibility. Returns `Ok(None)` when no nonnegative weighting exists and an
/// error only when the LP pivot cap is hit.
pub fn find_nonnegative_weighting(ws: &WeightingSolution) -> Result<Option<Vec<f64>>> {
    let Some(p) = ws.particular.as_ref() else {
        return Ok(None);
    };
    let tolerance = SOLVE_TOLERANCE;
    if ws.nullspace_basis.is_empty() || p.iter().all(|&x| x >= -tolerance) {
        return Ok(p.iter().all(|&x| x >= -tolerance).then(|| p.clone()));
    }
    match weighting_lp(ws, false, None)? {
        WeightingLp::Found { w, .. } if w.iter().all(|&x| x >= -tolerance) => Ok(Some(w)),
        WeightingLp::Found { w, .. } => Err(Error::Numerical(format!(
            "LP vertex has entry {} below tolerance",
            w.iter().copied().fold(f64::INFINITY, f64::min)
        ))),
        WeightingLp::Infeasible => Ok(None),
        WeightingLp::Unbounded => Err(Error::Numerical("feasibility LP reported unbounded".into())),
    }
}

/// The weighting whose smallest entry is as large as possible, together with
/// that smallest entry. `None` if no nonnegative weighting exists.
///
/// A positive weighting exists exactly when the returned floor is positive.
pub fn max_min_weighting(ws: &WeightingSolution) -> Result<Option<(Vec<f64>, f64)>> {
    let Some(p) = ws.particular.as_ref() else {
        return Ok(None);
    };
    let min_of = |w: &[f64]| w.iter().copied().fold(f64::INFINITY, f64::min);
    if ws.nullspace_basis.is_empty() {
        let floor = min_of(p);
        return Ok((floor >= -SOLVE_TOLERANCE).then(|| (p.clone(), floor)));
    }
    if find_nonnegative_weighting(ws)?.is_none() {
        return Ok(None);
    }
    match weighting_lp(ws, true, None)? {
        WeightingLp::Found { w, .. } => {
            let floor = min_of(&w);
            Ok(Some((w, floor)))
        }
        WeightingLp::Infeasible => Ok(None),
        WeightingLp::Unbounded => Err(Error::Numerical(
            "weighting floor is unbounded; kernel has a positive direction".into(),
        )),
    }
}

/// Whether the set of nonnegative weightings is a single point (or empty).
pub fn nonnegative_weighting_is_unique(ws: &WeightingSolution) -> Result<bool> {
    if ws.particular.is_none() || ws.nullspace_basis.is_empty() {
        return Ok(true);
    }
    if find_nonnegative_weighting(ws)?.is_none() {
        return Ok(true);
    }
    let k = ws.subset.len();
    for i in 0..k {
        let mut objective = vec![0.0; k];
        objective[i] = 1.0;
        let low = match weighting_lp(ws, false, Some(&objective))? {
            WeightingLp::Found { w, .. } => w[i],
            _ => return Ok(false),
        };
        objective[i] = -1.0;
        let high = match weighting_lp(ws, false, Some(&objective))? {
            WeightingLp::Found { w, .. } => w[i],
            _ => return Ok(false),
        };
        if high - low > 10.0 * SOLVE_TOLERANCE {
            return Ok(false);
        }
    }
    Ok(true)
}

enum WeightingLp {
    Found { w: Vec<f64> },
    Infeasible,
    Unbounded,
}

/// LP over kernel coordinates `y = u - v` with slack `s = w - floor * 1 >= 0`,
/// where `w = p + K y`:
///
/// `K u - K v - floor * 1 - s = -p`, all variables nonnegative.
///
/// With `maximize_floor` the objective is `-floor`; with `objective` it is
/// `objective . w`; otherwise pure feasibility.
fn weighting_lp(
    ws: &WeightingSolution,
    maximize_floor: bool,
    objective: Option<&[f64]>,
) -> Result<WeightingLp> {
    let p = ws.particular.as_ref().expect("caller checked particular");
    let basis = &ws.nullspace_basis;
    let k = p.len();
    let d = basis.len();
    let floor_cols = usize::from(maximize_floor);
    let nv = 2 * d + floor_cols + k;

    let mut a = vec![vec![0.0; nv]; k];
    for i in 0..k {
        for (j, v) in basis.iter().enumerate() {
            a[i][j] = v[i];
            a[i][d + j] = -v[i];
        }
        if maximize_floor {
            a[i][2 * d] = -1.0;
        }
        a[i][2 * d + floor_cols + i] = -1.0;
    }
    let b: Vec<f64> = p.iter().map(|x| -x).collect();

    let mut c = vec![0.0; nv];
    if let Some(obj) = objective {
        for (j, v) in basis.iter().enumerate() {
            let dot: f64 = obj.iter().zip(v).map(|(o, x)| o * x).sum();
            c[j] = dot;
            c[d + j] = -dot;
        }
    }
    if maximize_floor {
        c[2 * d] = -1.0;
    }

    let problem = lp::StandardForm { a, b, c };
    Ok(match lp::solve(&problem, LP_PIVOT_LIMIT)? {
        lp::Outcome::Optimal { x, .. } => {
            let coords: Vec<f64> = (0..d).map(|j| x[j] - x[d + j]).collect();
            WeightingLp::Found {
                w: ws.point(&coords).expect("particular present"),
            }
        }
        lp::Outcome::Infeasible => WeightingLp::Infeasible,
        lp::Outcome::Unbounded => WeightingLp::Unbounded,
    })
}

/// Smallest eigenvalue of the symmetric part `(Z + Z^T) / 2`.
///
/// `x^T Z x = x^T ((Z + Z^T) / 2) x`, so definiteness of `Z` is decided by its
/// symmetric part.
pub fn min_eigenvalue(z: &SimilarityMatrix) -> f64 {
    let n = z.n();
    let sym = DMatrix::from_fn(n, n, |i, j| 0.5 * (z.get(i, j) + z.get(j, i)));
    SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn eigen_floor(z: &SimilarityMatrix) -> f64 {
    EIGEN_FLOOR * z.inf_norm().max(f64::MIN_POSITIVE)
}

pub fn is_positive_semidefinite(z: &SimilarityMatrix) -> bool {
    min_eigenvalue(z) >= -eigen_floor(z)
}

pub fn is_positive_definite(z: &SimilarityMatrix) -> bool {
    min_eigenvalue(z) > eigen_floor(z)
}

/// `Z_ik >= min(Z_ij, Z_jk)` for all `i, j, k`, and every diagonal entry
/// strictly exceeds every off-diagonal entry.
pub fn is_ultrametric(z: &SimilarityMatrix) -> bool {
    let n = z.n();
    let max_off = (0..n)
        .flat_map(|j| (0..n).filter(move |&k| k != j).map(move |k| (j, k)))
        .map(|(j, k)| z.get(j, k))
        .fold(f64::NEG_INFINITY, f64::max);
    if (0..n).any(|i| z.get(i, i) <= max_off) {
        return false;
    }
    for i in 0..n {
        for j in 0..n {
            let zij = z.get(i, j);
            for k in 0..n {
                if z.get(i, k) < zij.min(z.get(j, k)) {
                    return false;
                }
            }
        }
    }
    true
}

/// `Z_ii > sum_{j != i} Z_ij` for every row.
pub fn is_strictly_diagonally_dominant(z: &SimilarityMatrix) -> bool {
    (0..z.n()).all(|i| {
        let off: f64 = z.row(i).iter().enumerate().filter(|&(j, _)| j != i).map(|(_, x)| x).sum();
        z.get(i, i) > off
    })
}
