//! Similarity-sensitive diversity `D_q^Z(p)` of every order `q` in `[0, inf]`,
//! and the distributions that maximize it for all orders at once.
//!
//! ```
//! use maxdiv::{maximize, SimilarityMatrix};
//!
//! let z = SimilarityMatrix::from_rows(&[
//!     vec![1.0, 0.4, 0.4],
//!     vec![0.4, 1.0, 0.9],
//!     vec![0.4, 0.9, 1.0],
//! ])?;
//! let best = maximize(&z)?;
//! assert!((best.dmax - 2.3 / 1.58).abs() < 1e-12);
//! # Ok::<(), maxdiv::Error>(())
//! ```

pub mod cli;
pub mod diversity;
pub mod error;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod maximizer;
pub mod oracle;

pub use diversity::{diversity, diversity_profile, ordinariness, power_mean, Distribution, DiversityProfile, Order};
pub use error::{Error, Result};
pub use graph::{
    adjacency_matrix, clique_capacity, epsilon_entropy_bounds, independence_number, FiniteMetric, IrreflexiveGraph,
    ReflexiveGraph,
};
pub use linalg::{solve_weighting_space, SimilarityMatrix, WeightingSolution};
pub use maximizer::{
    check_invariant, full_support_diagnostics, maximize, maximize_exhaustive, maximize_fast_path, normalize_weighting,
    MaximizationResult,
};
