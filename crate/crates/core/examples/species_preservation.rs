//! Does maximizing diversity keep every species?

use maxdiv::{adjacency_matrix, full_support_diagnostics, ReflexiveGraph, SimilarityMatrix};

fn report(name: &str, z: &SimilarityMatrix) -> maxdiv::Result<()> {
    let d = full_support_diagnostics(z)?;
    println!(
        "{name:<12} some maximizer keeps all: {:<5}  every maximizer does: {:<5}  min eigenvalue {:+.3}",
        d.exists_full_support_maximizer, d.all_maximizers_full_support, d.min_eigenvalue
    );
    Ok(())
}

fn main() -> maxdiv::Result<()> {
    report("identity", &SimilarityMatrix::identity(3))?;
    report("all ones", &SimilarityMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]])?)?;
    report("3-path", &adjacency_matrix(&ReflexiveGraph::path(3)?))?;
    let z = SimilarityMatrix::from_rows(&[vec![1.0, 0.9, 0.0], vec![0.9, 1.0, 0.9], vec![0.0, 0.9, 1.0]])?;
    report("middle link", &z)?;
    Ok(())
}
