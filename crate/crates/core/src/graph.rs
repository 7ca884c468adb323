//! Graphs and finite metrics as similarity data.
//!
//! A reflexive graph is a similarity matrix with 0/1 entries and unit
//! diagonal, and its maximum diversity is its independence number. Cliques of
//! an irreflexive graph are independent sets of its (reflexive) complement.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::diversity::Distribution;
use crate::error::{Error, Result};
use crate::linalg::SimilarityMatrix;
use crate::maximizer::maximize_exhaustive;

/// Vertex cap for the bitmask branch-and-bound.
pub const MAX_VERTICES: usize = 64;

/// Vertex cap for brute-force covering numbers.
pub const MAX_COVERING_POINTS: usize = 24;

/// Tolerance used when validating metric axioms.
pub const METRIC_TOLERANCE: f64 = 1e-12;

/// Largest accepted gap between a 0/1 magnitude and the nearest integer.
pub const ROUNDING_TOLERANCE: f64 = 1e-6;

fn edge_set(n: usize, edges: impl IntoIterator<Item = (usize, usize)>, loops: bool) -> Result<BTreeSet<(usize, usize)>> {
    if n == 0 {
        return Err(Error::InvalidGraph("graph has no vertices".into()));
    }
    if n > MAX_VERTICES {
        return Err(Error::TooManySpecies { n, cap: MAX_VERTICES });
    }
    let mut set = BTreeSet::new();
    for (i, j) in edges {
        if i >= n || j >= n {
            return Err(Error::InvalidGraph(format!(
                "edge ({i}, {j}) leaves the vertex range 0..{n}"
            )));
        }
        if i == j {
            if !loops {
                return Err(Error::InvalidGraph(format!("loop at vertex {i}")));
            }
            continue;
        }
        set.insert((i.min(j), i.max(j)));
    }
    Ok(set)
}

fn complement_edges(n: usize, edges: &BTreeSet<(usize, usize)>) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            if !edges.contains(&(i, j)) {
                out.insert((i, j));
            }
        }
    }
    out
}

fn neighbour_masks(n: usize, edges: &BTreeSet<(usize, usize)>) -> Vec<u64> {
    let mut masks = vec![0u64; n];
    for &(i, j) in edges {
        masks[i] |= 1 << j;
        masks[j] |= 1 << i;
    }
    masks
}

/// Undirected graph with a loop at every vertex. Vertices are `0..n`; edges
/// are stored as `(i, j)` with `i < j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReflexiveGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl ReflexiveGraph {
    /// Loops in `edges` are accepted and ignored.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Ok(Self {
            n,
            edges: edge_set(n, edges, true)?,
        })
    }

    pub fn edgeless(n: usize) -> Result<Self> {
        Self::new(n, [])
    }

    pub fn complete(n: usize) -> Result<Self> {
        Self::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
    }

    pub fn path(n: usize) -> Result<Self> {
        Self::new(n, (1..n).map(|i| (i - 1, i)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Every vertex is adjacent to itself.
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        i == j || self.edges.contains(&(i.min(j), i.max(j)))
    }

    pub fn complement(&self) -> IrreflexiveGraph {
        IrreflexiveGraph {
            n: self.n,
            edges: complement_edges(self.n, &self.edges),
        }
    }

    pub fn is_independent(&self, vertices: &[usize]) -> bool {
        vertices.iter().enumerate().all(|(a, &i)| {
            vertices[a + 1..].iter().all(|&j| i != j && !self.adjacent(i, j))
        })
    }
}

/// Undirected graph without loops.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IrreflexiveGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl IrreflexiveGraph {
    /// Loops are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Ok(Self {
            n,
            edges: edge_set(n, edges, false)?,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        i != j && self.edges.contains(&(i.min(j), i.max(j)))
    }

    pub fn complement(&self) -> ReflexiveGraph {
        ReflexiveGraph {
            n: self.n,
            edges: complement_edges(self.n, &self.edges),
        }
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices.iter().enumerate().all(|(a, &i)| {
            vertices[a + 1..].iter().all(|&j| self.adjacent(i, j))
        })
    }
}

/// The 0/1 similarity matrix of `g`, with unit diagonal.
pub fn adjacency_matrix(g: &ReflexiveGraph) -> SimilarityMatrix {
    let n = g.n;
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        entries[i * n + i] = 1.0;
    }
    for (i, j) in g.edges() {
        entries[i * n + j] = 1.0;
        entries[j * n + i] = 1.0;
    }
    SimilarityMatrix::from_row_major(n, entries).expect("adjacency matrices are valid")
}

/// Vertices in degeneracy order: repeatedly remove a vertex of least degree.
fn degeneracy_order(n: usize, nbrs: &[u64]) -> Vec<usize> {
    let mut alive: u64 = if n == 64 { u64::MAX } else { (1 << n) - 1 };
    let mut order = Vec::with_capacity(n);
    while alive != 0 {
        let v = (0..n)
            .filter(|&v| alive >> v & 1 == 1)
            .min_by_key(|&v| (nbrs[v] & alive).count_ones())
            .expect("alive is nonempty");
        order.push(v);
        alive &= !(1 << v);
    }
    order
}

struct Search<'a> {
    nbrs: &'a [u64],
    best: u64,
    best_size: u32,
}

impl Search<'_> {
    fn run(&mut self, candidates: u64, chosen: u64) {
        let size = chosen.count_ones();
        if candidates == 0 {
            if size > self.best_size {
                self.best = chosen;
                self.best_size = size;
            }
            return;
        }
        if size + candidates.count_ones() <= self.best_size {
            return;
        }
        let v = candidates.trailing_zeros() as usize;
        let bit = 1u64 << v;
        let live = self.nbrs[v] & candidates;
        self.run(candidates & !live & !bit, chosen | bit);
        // a vertex with at most one live neighbour belongs to some maximum set
        if live.count_ones() > 1 {
            self.run(candidates & !bit, chosen);
        }
    }
}

/// A maximum independent set of `g`, in increasing vertex order.
///
/// Branch-and-bound on bitmasks, with vertices relabelled in degeneracy order
/// so the branching vertex always has few live neighbours.
pub fn maximum_independent_set(g: &ReflexiveGraph) -> Vec<usize> {
    let n = g.n;
    let nbrs = neighbour_masks(n, &g.edges);
    let order = degeneracy_order(n, &nbrs);
    let mut position = vec![0; n];
    for (k, &v) in order.iter().enumerate() {
        position[v] = k;
    }
    let relabelled: Vec<u64> = order
        .iter()
        .map(|&v| {
            (0..n)
                .filter(|&u| nbrs[v] >> u & 1 == 1)
                .fold(0u64, |m, u| m | 1 << position[u])
        })
        .collect();

    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut search = Search {
        nbrs: &relabelled,
        best: 0,
        best_size: 0,
    };
    search.run(all, 0);
    let mut set: Vec<usize> = (0..n)
        .filter(|&k| search.best >> k & 1 == 1)
        .map(|k| order[k])
        .collect();
    set.sort_unstable();
    set
}

/// The independence number `alpha(g)`.
pub fn independence_number(g: &ReflexiveGraph) -> usize {
    maximum_independent_set(g).len()
}

/// A maximum clique of `x`, in increasing vertex order.
pub fn maximum_clique(x: &IrreflexiveGraph) -> Vec<usize> {
    maximum_independent_set(&x.complement())
}

pub fn clique_number(x: &IrreflexiveGraph) -> usize {
    maximum_clique(x).len()
}

/// `sum p_i p_j` over ordered pairs `(i, j)` of adjacent vertices, that is
/// `p^T A p` for the zero-diagonal adjacency matrix `A`.
pub fn adjacent_pair_mass(x: &IrreflexiveGraph, p: &Distribution) -> Result<f64> {
    if p.n() != x.n {
        return Err(Error::DimensionMismatch {
            expected: x.n,
            found: p.n(),
        });
    }
    let q = p.probs();
    Ok(2.0 * x.edges().map(|(i, j)| q[i] * q[j]).sum::<f64>())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CliqueCapacity {
    /// `1 - 1/omega(X)`, the supremum of [`adjacent_pair_mass`] over distributions.
    pub value: f64,
    pub clique_number: usize,
    pub clique: Vec<usize>,
    /// Uniform on `clique`, zero elsewhere.
    pub witness: Distribution,
}

pub fn clique_capacity(x: &IrreflexiveGraph) -> CliqueCapacity {
    let clique = maximum_clique(x);
    let omega = clique.len();
    CliqueCapacity {
        value: 1.0 - 1.0 / omega as f64,
        clique_number: omega,
        witness: Distribution::uniform_on(x.n, &clique).expect("cliques are nonempty"),
        clique,
    }
}

/// A metric on `{0, .., n-1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiniteMetric {
    n: usize,
    dist: Vec<f64>,
}

impl FiniteMetric {
    /// Validates the metric axioms within [`METRIC_TOLERANCE`]. Asymmetry
    /// within tolerance is averaged away.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidMetric("no points".into()));
        }
        let mut dist = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare {
                    row: i,
                    len: row.len(),
                    expected: n,
                });
            }
            for (j, &d) in row.iter().enumerate() {
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidMetric(format!("d({i}, {j}) = {d}")));
                }
            }
            dist.extend_from_slice(row);
        }
        for i in 0..n {
            if dist[i * n + i] > METRIC_TOLERANCE {
                return Err(Error::InvalidMetric(format!(
                    "d({i}, {i}) = {} is not zero",
                    dist[i * n + i]
                )));
            }
            dist[i * n + i] = 0.0;
            for j in i + 1..n {
                let (a, b) = (dist[i * n + j], dist[j * n + i]);
                if (a - b).abs() > METRIC_TOLERANCE {
                    return Err(Error::InvalidMetric(format!(
                        "d({i}, {j}) = {a} differs from d({j}, {i}) = {b}"
                    )));
                }
                let mean = 0.5 * (a + b);
                dist[i * n + j] = mean;
                dist[j * n + i] = mean;
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let slack = dist[i * n + j] + dist[j * n + k] - dist[i * n + k];
                    if slack < -METRIC_TOLERANCE {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails: d({i}, {k}) > d({i}, {j}) + d({j}, {k})"
                        )));
                    }
                }
            }
        }
        Ok(Self { n, dist })
    }

    /// Euclidean distances between points in the plane.
    pub fn from_points(points: &[[f64; 2]]) -> Result<Self> {
        let rows: Vec<Vec<f64>> = points
            .iter()
            .map(|a| {
                points
                    .iter()
                    .map(|b| (a[0] - b[0]).hypot(a[1] - b[1]))
                    .collect()
            })
            .collect();
        Self::from_rows(&rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.dist.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// `i ~ j` iff `d(i, j) <= eps`.
    pub fn threshold_graph(&self, eps: f64) -> ReflexiveGraph {
        let n = self.n;
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.get(i, j) <= eps);
        ReflexiveGraph::new(n, edges.collect::<Vec<_>>()).expect("vertex range is valid")
    }

    /// The minimum number of closed `eps`-balls centred at points that cover
    /// the space, by exhaustive search.
    pub fn covering_number(&self, eps: f64) -> Result<usize> {
        check_radius(eps)?;
        let n = self.n;
        if n > MAX_COVERING_POINTS {
            return Err(Error::TooManySpecies {
                n,
                cap: MAX_COVERING_POINTS,
            });
        }
        let balls: Vec<u32> = (0..n)
            .map(|i| (0..n).filter(|&j| self.get(i, j) <= eps).fold(0, |m, j| m | 1 << j))
            .collect();
        let full: u32 = ((1u64 << n) - 1) as u32;
        let best = (1u32..=full)
            .filter(|&centres| {
                (0..n)
                    .filter(|&i| centres >> i & 1 == 1)
                    .fold(0, |m, i| m | balls[i])
                    == full
            })
            .map(u32::count_ones)
            .min()
            .expect("all centres cover");
        Ok(best as usize)
    }
}

fn check_radius(eps: f64) -> Result<()> {
    if eps.is_finite() && eps > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidMetric(format!("radius must be positive, got {eps}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsilonEntropyBounds {
    pub epsilon: f64,
    pub covering_number: usize,
    pub covering_number_half: usize,
    /// Maximum diversity of the threshold matrix `Z^eps`.
    pub dmax: f64,
    /// `dmax` rounded; equals the independence number of the threshold graph.
    pub alpha: usize,
}

/// `N(d, eps) <= Dmax(Z^eps) <= N(d, eps/2)`, with `Dmax` computed by
/// exhaustive maximization of the threshold matrix.
pub fn epsilon_entropy_bounds(d: &FiniteMetric, eps: f64) -> Result<EpsilonEntropyBounds> {
    check_radius(eps)?;
    let z = adjacency_matrix(&d.threshold_graph(eps));
    let dmax = maximize_exhaustive(&z)?.dmax;
    let alpha = dmax.round();
    if (dmax - alpha).abs() > ROUNDING_TOLERANCE {
        return Err(Error::Numerical(format!(
            "maximum diversity {dmax} of a 0/1 matrix is not an integer"
        )));
    }
    let bounds = EpsilonEntropyBounds {
        epsilon: eps,
        covering_number: d.covering_number(eps)?,
        covering_number_half: d.covering_number(eps / 2.0)?,
        dmax,
        alpha: alpha as usize,
    };
    if bounds.covering_number > bounds.alpha || bounds.alpha > bounds.covering_number_half {
        return Err(Error::Numerical(format!(
            "sandwich violated: N = {}, Dmax = {dmax}, N(eps/2) = {}",
            bounds.covering_number, bounds.covering_number_half
        )));
    }
    Ok(bounds)
}
