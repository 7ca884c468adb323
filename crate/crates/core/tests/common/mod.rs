#![allow(dead_code)]

use maxdiv::{Distribution, FiniteMetric, IrreflexiveGraph, ReflexiveGraph, SimilarityMatrix};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn matrix(rows: &[&[f64]]) -> SimilarityMatrix {
    SimilarityMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

pub fn three_species() -> SimilarityMatrix {
    matrix(&[&[1.0, 0.4, 0.4], &[0.4, 1.0, 0.9], &[0.4, 0.9, 1.0]])
}

pub fn nonsymmetric() -> SimilarityMatrix {
    matrix(&[&[1.0, 0.5], &[0.0, 1.0]])
}

/// Symmetric, unit diagonal, off-diagonal entries uniform in `[0, 1]`.
pub fn random_symmetric(rng: &mut impl Rng, n: usize) -> SimilarityMatrix {
    let mut rows = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v: f64 = rng.random();
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    SimilarityMatrix::from_rows(&rows).unwrap()
}

/// Nonnegative, positive diagonal, not necessarily symmetric.
pub fn random_general(rng: &mut impl Rng, n: usize) -> SimilarityMatrix {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        rng.random_range(0.2..2.0)
                    } else if rng.random_bool(0.2) {
                        0.0
                    } else {
                        rng.random_range(0.0..1.5)
                    }
                })
                .collect()
        })
        .collect();
    SimilarityMatrix::from_rows(&rows).unwrap()
}

/// Similarities from a random hierarchical clustering: `Z_ij` is the level at
/// which `i` and `j` first share a cluster. Levels lie below the unit diagonal.
pub fn random_ultrametric(rng: &mut impl Rng, n: usize) -> SimilarityMatrix {
    let mut rows = vec![vec![0.0; n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut level: f64 = rng.random_range(0.3..0.99);
    while clusters.len() > 1 {
        clusters.shuffle(rng);
        let a = clusters.pop().unwrap();
        let b = clusters.pop().unwrap();
        for &i in &a {
            for &j in &b {
                rows[i][j] = level;
                rows[j][i] = level;
            }
        }
        clusters.push([a, b].concat());
        if rng.random_bool(0.8) {
            level *= rng.random_range(0.2..1.0);
        }
    }
    SimilarityMatrix::from_rows(&rows).unwrap()
}

/// Unit diagonal with every off-diagonal row sum below one.
pub fn random_diagonally_dominant(rng: &mut impl Rng, n: usize) -> SimilarityMatrix {
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v: f64 = rng.random();
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    let widest = rows.iter().map(|r| r.iter().sum::<f64>()).fold(0.0, f64::max);
    let scale = if widest > 0.0 { rng.random_range(0.05..0.999) / widest } else { 0.0 };
    for (i, row) in rows.iter_mut().enumerate() {
        for v in row.iter_mut() {
            *v *= scale;
        }
        row[i] = 1.0;
    }
    SimilarityMatrix::from_rows(&rows).unwrap()
}

pub fn random_edges(rng: &mut impl Rng, n: usize, density: f64) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|_| rng.random_bool(density))
        .collect()
}

pub fn random_reflexive(rng: &mut impl Rng, n: usize) -> ReflexiveGraph {
    let density = rng.random_range(0.1..0.9);
    ReflexiveGraph::new(n, random_edges(rng, n, density)).unwrap()
}

pub fn random_irreflexive(rng: &mut impl Rng, n: usize) -> IrreflexiveGraph {
    let density = rng.random_range(0.1..0.9);
    IrreflexiveGraph::new(n, random_edges(rng, n, density)).unwrap()
}

pub fn random_planar_metric(rng: &mut impl Rng, n: usize) -> FiniteMetric {
    let points: Vec<[f64; 2]> = (0..n)
        .map(|_| [rng.random_range(0.0..3.0), rng.random_range(0.0..3.0)])
        .collect();
    FiniteMetric::from_points(&points).unwrap()
}

/// Random distribution; each species is absent with probability `sparsity`,
/// but at least one is present.
pub fn random_distribution(rng: &mut impl Rng, n: usize, sparsity: f64) -> Distribution {
    let mut a: Vec<f64> = (0..n)
        .map(|_| if rng.random_bool(sparsity) { 0.0 } else { rng.random_range(0.01..1.0) })
        .collect();
    if a.iter().all(|&x| x == 0.0) {
        a[rng.random_range(0..n)] = 1.0;
    }
    Distribution::from_abundances(&a).unwrap()
}

/// Brute-force independence number over all vertex subsets.
pub fn brute_alpha(g: &ReflexiveGraph) -> usize {
    let n = g.n();
    (0u32..1 << n)
        .filter(|&m| {
            let vs: Vec<usize> = (0..n).filter(|&i| m >> i & 1 == 1).collect();
            g.is_independent(&vs)
        })
        .map(u32::count_ones)
        .max()
        .unwrap() as usize
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
