//! Asymmetric similarities: diversity is defined, but maximizers disagree across orders.

use maxdiv::oracle::{oracle_grid_max, GridSpec};
use maxdiv::{diversity, maximize, Distribution, Order, SimilarityMatrix};

fn main() -> maxdiv::Result<()> {
    let z = SimilarityMatrix::from_rows(&[vec![1.0, 0.5], vec![0.0, 1.0]])?;

    let p = Distribution::uniform(2);
    println!("D_2(uniform) = {}", diversity(&z, &p, Order::TWO)?);

    let spec = GridSpec::new(2, 60)?;
    for q in [Order::ZERO, Order::TWO, Order::INFINITY] {
        let best = oracle_grid_max(&z, q, spec)?;
        println!("q = {q:<3}: grid max {:.4} at {:?}", best.value, best.point.probs());
    }

    match maximize(&z) {
        Err(e) => println!("\nmaximize refuses: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
