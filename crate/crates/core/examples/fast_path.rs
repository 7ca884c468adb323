//! Ultrametric similarities skip subset enumeration entirely.

use maxdiv::linalg::{is_positive_definite, is_ultrametric};
use maxdiv::{maximize_exhaustive, maximize_fast_path, SimilarityMatrix};

fn main() -> maxdiv::Result<()> {
    // two genera of two species each, same family
    let z = SimilarityMatrix::from_rows(&[
        vec![1.0, 0.7, 0.2, 0.2],
        vec![0.7, 1.0, 0.2, 0.2],
        vec![0.2, 0.2, 1.0, 0.5],
        vec![0.2, 0.2, 0.5, 1.0],
    ])?;
    println!("ultrametric: {}, positive definite: {}", is_ultrametric(&z), is_positive_definite(&z));

    let fast = maximize_fast_path(&z)?.expect("fast path applies");
    let full = maximize_exhaustive(&z)?;
    println!("fast path   Dmax = {:.12} ({:?})", fast.dmax, fast.method);
    println!("enumeration Dmax = {:.12}", full.dmax);
    println!("maximizer {:?}", fast.sample_maximizer.probs());

    let big = SimilarityMatrix::identity(40);
    println!("\n40 unrelated species: Dmax = {}", maximize_fast_path(&big)?.unwrap().dmax);
    Ok(())
}
