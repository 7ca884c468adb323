//! Covering numbers bracket the maximum diversity of a thresholded metric space.

use maxdiv::{epsilon_entropy_bounds, FiniteMetric};

fn main() -> maxdiv::Result<()> {
    let points = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [0.0, 1.5], [2.5, 2.5], [3.0, 0.5]];
    let d = FiniteMetric::from_points(&points)?;

    println!("{:>5}  {:>8}  {:>4}  {:>10}", "eps", "N(eps)", "Dmax", "N(eps/2)");
    for eps in [0.5, 1.0, 1.5, 2.0, 3.0] {
        let b = epsilon_entropy_bounds(&d, eps)?;
        println!("{eps:>5}  {:>8}  {:>4}  {:>10}", b.covering_number, b.alpha, b.covering_number_half);
    }
    Ok(())
}
