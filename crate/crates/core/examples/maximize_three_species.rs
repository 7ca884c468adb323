//! Maximum diversity of three species where two are nearly identical.

use maxdiv::{diversity, maximize, Order, SimilarityMatrix};

fn main() -> maxdiv::Result<()> {
    let z = SimilarityMatrix::from_rows(&[vec![1.0, 0.4, 0.4], vec![0.4, 1.0, 0.9], vec![0.4, 0.9, 1.0]])?;
    let r = maximize(&z)?;

    println!("Dmax = {:.6} via {:?}", r.dmax, r.method);
    let p = &r.sample_maximizer;
    println!("maximizer = ({:.4}, {:.4}, {:.4})", p.probs()[0], p.probs()[1], p.probs()[2]);
    println!("unique: {}, full support: {}", r.unique_maximizer, p.has_full_support());

    // one distribution maximizes every order at once
    for q in [0.0, 0.5, 1.0, 2.0, f64::INFINITY] {
        println!("  D_{:<4} = {:.6}", q, diversity(&z, p, Order::new(q)?)?);
    }
    Ok(())
}
