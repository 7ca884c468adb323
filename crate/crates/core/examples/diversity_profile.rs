//! Diversity profile of a small community across viewpoint parameters.

use maxdiv::{diversity_profile, Distribution, Order, SimilarityMatrix};

fn main() -> maxdiv::Result<()> {
    // two closely related species and one outlier
    let z = SimilarityMatrix::from_rows(&[vec![1.0, 0.8, 0.1], vec![0.8, 1.0, 0.1], vec![0.1, 0.1, 1.0]])?;
    let p = Distribution::from_abundances(&[50.0, 30.0, 20.0])?;

    let profile = diversity_profile(&z, &p, &Order::default_grid())?;
    println!("{:>6}  {}", "q", "D_q");
    for (q, d) in profile.iter() {
        println!("{:>6}  {d:.6}", q.to_string());
    }

    let naive = diversity_profile(&SimilarityMatrix::identity(3), &p, &Order::default_grid())?;
    println!("\nignoring similarity, D_0 = {} (species richness)", naive.values[0]);
    Ok(())
}
