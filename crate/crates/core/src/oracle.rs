//! Brute-force ground truth: grid search over the simplex, local refinement
//! by pairwise mass transfer, and a plain linear solver.
//!
//! None of this is used by the solver itself; it exists so that the solver's
//! answers can be checked by a route that shares no code with it.

use rayon::prelude::*;
use serde::Serialize;

use crate::diversity::{diversity, diversity_from_parts, Distribution, Order};
use crate::error::{Error, Result};
use crate::linalg::SimilarityMatrix;

pub const DEFAULT_MAX_SPECIES: usize = 6;
pub const DEFAULT_MAX_RESOLUTION: usize = 60;

/// Stationarity target for [`oracle_refine`].
pub const REFINE_TOLERANCE: f64 = 1e-8;

const GOLDEN_STEPS: usize = 80;
const MAX_SWEEPS: usize = 5_000;
const MAX_PAIR_STEPS: usize = 200_000;

/// All points `k / m` with `k` a composition of `m` into `n` parts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GridSpec {
    pub n: usize,
    pub resolution: usize,
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

impl GridSpec {
    /// Within the default limits of 6 species and resolution 60.
    pub fn new(n: usize, resolution: usize) -> Result<Self> {
        Self::with_limits(n, resolution, DEFAULT_MAX_SPECIES, DEFAULT_MAX_RESOLUTION)
    }

    pub fn with_limits(n: usize, resolution: usize, max_n: usize, max_resolution: usize) -> Result<Self> {
        if n == 0 || resolution == 0 {
            return Err(Error::InvalidGrid(format!(
                "need n >= 1 and resolution >= 1, got n = {n}, m = {resolution}"
            )));
        }
        let spec = Self { n, resolution };
        if n > max_n || resolution > max_resolution {
            let limit = GridSpec {
                n: max_n.max(1),
                resolution: max_resolution.max(1),
            }
            .size();
            return Err(Error::GridTooLarge {
                points: spec.size(),
                limit,
            });
        }
        Ok(spec)
    }

    /// `C(m + n - 1, n - 1)`.
    pub fn size(&self) -> u128 {
        binomial((self.resolution + self.n - 1) as u128, (self.n - 1) as u128)
    }

    pub fn compositions(&self) -> Compositions {
        Compositions::new(self.n, self.resolution)
    }
}

/// Compositions of `total` into `parts` nonnegative parts, in decreasing
/// lexicographic order starting from `(total, 0, .., 0)`.
#[derive(Clone, Debug)]
pub struct Compositions {
    current: Vec<usize>,
    done: bool,
}

impl Compositions {
    pub fn new(parts: usize, total: usize) -> Self {
        let mut current = vec![0; parts];
        if let Some(first) = current.first_mut() {
            *first = total;
        }
        Self {
            current,
            done: parts == 0 && total != 0,
        }
    }

    fn advance(&mut self) {
        let n = self.current.len();
        let Some(j) = (0..n.saturating_sub(1)).rev().find(|&j| self.current[j] > 0) else {
            self.done = true;
            return;
        };
        self.current[j] -= 1;
        let rest: usize = self.current[j + 1..].iter().sum::<usize>() + 1;
        for v in &mut self.current[j + 1..] {
            *v = 0;
        }
        self.current[j + 1] = rest;
    }
}

impl Iterator for Compositions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        self.advance();
        Some(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridMax {
    pub value: f64,
    pub point: Distribution,
}

/// Maximizes each of `k` objectives over the grid. `eval(p, out)` writes the
/// `k` objective values at `p` into `out`. Ties go to the earliest point in
/// [`Compositions`] order.
pub fn grid_search<F>(spec: GridSpec, k: usize, eval: F) -> Vec<(f64, Vec<f64>)>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    let (n, m) = (spec.n, spec.resolution);
    let scale = 1.0 / m as f64;
    let chunks: Vec<Vec<(f64, Vec<f64>)>> = (0..=m)
        .into_par_iter()
        .map(|offset| {
            let head = m - offset;
            let mut best = vec![(f64::NEG_INFINITY, Vec::new()); k];
            let mut p = vec![0.0; n];
            let mut values = vec![0.0; k];
            p[0] = head as f64 * scale;
            for tail in Compositions::new(n - 1, m - head) {
                for (dst, &c) in p[1..].iter_mut().zip(&tail) {
                    *dst = c as f64 * scale;
                }
                eval(&p, &mut values);
                for (b, &v) in best.iter_mut().zip(&values) {
                    if v > b.0 {
                        *b = (v, p.clone());
                    }
                }
            }
            best
        })
        .collect();
    let mut best = vec![(f64::NEG_INFINITY, Vec::new()); k];
    for chunk in chunks {
        for (b, c) in best.iter_mut().zip(chunk) {
            if c.0 > b.0 {
                *b = c;
            }
        }
    }
    best
}

fn check_grid_dims(z: &SimilarityMatrix, spec: GridSpec) -> Result<()> {
    if z.n() != spec.n {
        return Err(Error::DimensionMismatch {
            expected: z.n(),
            found: spec.n,
        });
    }
    Ok(())
}

/// Grid maxima of `D_q` for several orders, sharing each `Zp` evaluation.
pub fn oracle_grid_max_orders(z: &SimilarityMatrix, orders: &[Order], spec: GridSpec) -> Result<Vec<GridMax>> {
    check_grid_dims(z, spec)?;
    let n = z.n();
    let best = grid_search(spec, orders.len(), |p, out| {
        let mut weights = [0.0; DEFAULT_MAX_SPECIES];
        let mut zp = [0.0; DEFAULT_MAX_SPECIES];
        let mut weights_vec;
        let mut zp_vec;
        let (w, x): (&mut [f64], &mut [f64]) = if n <= DEFAULT_MAX_SPECIES {
            (&mut weights[..], &mut zp[..])
        } else {
            weights_vec = vec![0.0; n];
            zp_vec = vec![0.0; n];
            (&mut weights_vec[..], &mut zp_vec[..])
        };
        let mut s = 0;
        for i in 0..n {
            if p[i] > 0.0 {
                let row = z.row(i);
                w[s] = p[i];
                x[s] = (0..n).filter(|&j| p[j] > 0.0).map(|j| row[j] * p[j]).sum();
                s += 1;
            }
        }
        for (o, &q) in out.iter_mut().zip(orders) {
            *o = diversity_from_parts(&w[..s], &x[..s], q);
        }
    });
    Ok(best
        .into_iter()
        .map(|(value, point)| GridMax {
            value,
            point: Distribution::from_probs_unchecked(point),
        })
        .collect())
}

pub fn oracle_grid_max(z: &SimilarityMatrix, q: Order, spec: GridSpec) -> Result<GridMax> {
    Ok(oracle_grid_max_orders(z, &[q], spec)?.remove(0))
}

/// `p^T Z p`.
pub fn quadratic_form(z: &SimilarityMatrix, p: &[f64]) -> f64 {
    let zp = z.mul_vec(p);
    p.iter().zip(&zp).map(|(a, b)| a * b).sum()
}

/// Local polish of `start` for `D_q` by moves `p + t (e_j - e_k)`.
///
/// At `q = 2` each move is an exact line search on the quadratic `p^T Z p`
/// along the most violated pair of the stationarity conditions. Other orders
/// use golden-section search per pair, sweeping until no move improves.
/// Returns `start` unchanged when no move helps.
pub fn oracle_refine(z: &SimilarityMatrix, q: Order, start: &Distribution) -> Result<Distribution> {
    if z.n() != start.n() {
        return Err(Error::DimensionMismatch {
            expected: z.n(),
            found: start.n(),
        });
    }
    if z.n() == 1 {
        return Ok(start.clone());
    }
    let p = if q.value() == 2.0 {
        refine_quadratic(z, start.probs().to_vec())
    } else {
        refine_pairwise(z, q, start.probs().to_vec())?
    };
    Ok(Distribution::from_probs_unchecked(p))
}

fn refine_quadratic(z: &SimilarityMatrix, mut p: Vec<f64>) -> Vec<f64> {
    let n = z.n();
    let s = |i: usize, j: usize| 0.5 * (z.get(i, j) + z.get(j, i));
    let mut g: Vec<f64> = (0..n).map(|i| (0..n).map(|j| s(i, j) * p[j]).sum()).collect();
    for _ in 0..MAX_PAIR_STEPS {
        // receive at the smallest gradient, give from the largest on the support
        let j = (0..n).min_by(|&a, &b| g[a].total_cmp(&g[b])).expect("n >= 2");
        let k = (0..n)
            .filter(|&i| p[i] > 0.0)
            .max_by(|&a, &b| g[a].total_cmp(&g[b]))
            .expect("support is nonempty");
        if j == k || g[k] - g[j] <= REFINE_TOLERANCE * 1e-4 * g[k].abs().max(1.0) {
            break;
        }
        let curvature = s(j, j) + s(k, k) - 2.0 * s(j, k);
        let slope = g[j] - g[k];
        let t_max = p[k];
        let t = if curvature > 0.0 {
            (-slope / curvature).clamp(0.0, t_max)
        } else {
            t_max
        };
        if t <= 0.0 {
            break;
        }
        let before = p.clone();
        p[j] += t;
        p[k] -= t;
        if p[k] < 1e-300 || t == t_max {
            p[k] = 0.0;
        }
        let delta_j = p[j] - before[j];
        let delta_k = p[k] - before[k];
        for (i, gi) in g.iter_mut().enumerate() {
            *gi += s(i, j) * delta_j + s(i, k) * delta_k;
        }
        if p == before {
            break;
        }
    }
    let total: f64 = p.iter().sum();
    p.iter().map(|x| x / total).collect()
}

fn value_at(z: &SimilarityMatrix, q: Order, p: &[f64]) -> Result<f64> {
    diversity(z, &Distribution::from_probs_unchecked(p.to_vec()), q)
}

fn refine_pairwise(z: &SimilarityMatrix, q: Order, mut p: Vec<f64>) -> Result<Vec<f64>> {
    let n = z.n();
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut current = value_at(z, q, &p)?;
    for _ in 0..MAX_SWEEPS {
        let mut improved = false;
        for j in 0..n {
            for k in 0..n {
                if j == k || p[k] <= 0.0 {
                    continue;
                }
                let along = |t: f64| -> Result<f64> {
                    let mut x = p.clone();
                    x[j] += t;
                    x[k] -= t;
                    if t == p[k] {
                        x[k] = 0.0;
                    }
                    value_at(z, q, &x)
                };
                let (mut lo, mut hi) = (0.0, p[k]);
                let mut a = hi - inv_phi * (hi - lo);
                let mut b = lo + inv_phi * (hi - lo);
                let (mut fa, mut fb) = (along(a)?, along(b)?);
                for _ in 0..GOLDEN_STEPS {
                    if fa < fb {
                        lo = a;
                        a = b;
                        fa = fb;
                        b = lo + inv_phi * (hi - lo);
                        fb = along(b)?;
                    } else {
                        hi = b;
                        b = a;
                        fb = fa;
                        a = hi - inv_phi * (hi - lo);
                        fa = along(a)?;
                    }
                }
                let candidates = [(a, fa), (b, fb), (p[k], along(p[k])?)];
                let (t, v) = candidates
                    .into_iter()
                    .fold((0.0, current), |best, c| if c.1 > best.1 { c } else { best });
                if t > 0.0 && v > current + 1e-15 * current {
                    let full = t == p[k];
                    p[j] += t;
                    p[k] -= t;
                    if full {
                        p[k] = 0.0;
                    }
                    current = v;
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
    let total: f64 = p.iter().sum();
    Ok(p.iter().map(|x| x / total).collect())
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting; `None`
/// when a pivot falls below `1e-12` of the largest entry.
pub fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| row.iter().copied().chain([rhs]).collect())
        .collect();
    let scale = a.iter().flatten().fold(0.0f64, |s, x| s.max(x.abs()));
    for c in 0..n {
        let r = (c..n).max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs()))?;
        if m[r][c].abs() <= 1e-12 * scale {
            return None;
        }
        m.swap(r, c);
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..=n {
                m[r][k] -= f * m[c][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for c in (0..n).rev() {
        let s: f64 = (c + 1..n).map(|k| m[c][k] * x[k]).sum();
        x[c] = (m[c][n] - s) / m[c][c];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> SimilarityMatrix {
        SimilarityMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn composition_counts() {
        for n in 1..=5 {
            for total in 0..=7 {
                let all: Vec<_> = Compositions::new(n, total).collect();
                assert!(all.iter().all(|c| c.iter().sum::<usize>() == total));
                let spec = GridSpec { n, resolution: total.max(1) };
                if total >= 1 {
                    assert_eq!(all.len() as u128, spec.size());
                }
                let mut sorted = all.clone();
                sorted.sort();
                sorted.dedup();
                assert_eq!(sorted.len(), all.len());
            }
        }
        assert_eq!(Compositions::new(2, 2).collect::<Vec<_>>(), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn grid_limits() {
        assert!(GridSpec::new(7, 10).is_err());
        assert!(matches!(GridSpec::new(3, 61), Err(Error::GridTooLarge { .. })));
        assert!(GridSpec::new(0, 10).is_err());
        assert!(GridSpec::new(3, 0).is_err());
        assert_eq!(GridSpec::new(6, 60).unwrap().size(), 8_259_888);
    }

    #[test]
    fn naive_two_species() {
        let best = oracle_grid_max(&SimilarityMatrix::identity(2), Order::ONE, GridSpec::new(2, 10).unwrap()).unwrap();
        assert_eq!(best.point.probs(), &[0.5, 0.5]);
        assert!((best.value - 2.0).abs() < 1e-14);
    }

    #[test]
    fn nonsymmetric_infinity_peak() {
        let z = m(&[&[1.0, 0.5], &[0.0, 1.0]]);
        let best = oracle_grid_max(&z, Order::INFINITY, GridSpec::new(2, 60).unwrap()).unwrap();
        assert!((best.value - 1.5).abs() < 1e-12);
        assert!((best.point.probs()[0] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn refine_identity() {
        let z = SimilarityMatrix::identity(3);
        let start = Distribution::new(vec![0.4, 0.35, 0.25]).unwrap();
        let p = oracle_refine(&z, Order::TWO, &start).unwrap();
        assert!(p.probs().iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-8));
        let p = oracle_refine(&z, Order::ONE, &start).unwrap();
        assert!(p.probs().iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-6));
    }

    #[test]
    fn refine_is_idle_at_a_maximum() {
        let z = SimilarityMatrix::identity(2);
        let start = Distribution::uniform(2);
        assert_eq!(oracle_refine(&z, Order::new(0.5).unwrap(), &start).unwrap(), start);
    }

    #[test]
    fn dense_solve_examples() {
        let x = dense_solve(&[vec![2.0, 1.0], vec![1.0, 3.0]], &[3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-15 && (x[1] - 1.4).abs() < 1e-15);
        assert!(dense_solve(&[vec![1.0, 1.0], vec![1.0, 1.0]], &[1.0, 1.0]).is_none());
    }
}
