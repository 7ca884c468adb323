//! Maximum diversity of a graph's adjacency matrix is its independence number.

use maxdiv::graph::maximum_independent_set;
use maxdiv::{adjacency_matrix, independence_number, maximize_exhaustive, ReflexiveGraph};

fn main() -> maxdiv::Result<()> {
    // 5-cycle with a chord
    let g = ReflexiveGraph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)])?;
    let z = adjacency_matrix(&g);
    let r = maximize_exhaustive(&z)?;

    println!("alpha = {}, independent set {:?}", independence_number(&g), maximum_independent_set(&g));
    println!("Dmax  = {}", r.dmax);
    for w in &r.winners {
        println!("  winner {:?}{}", w.indices, if w.has_kernel() { " (with kernel)" } else { "" });
    }

    let path = ReflexiveGraph::path(4)?;
    let r = maximize_exhaustive(&adjacency_matrix(&path))?;
    println!("\n4-path: Dmax = {}, {} maximizing supports", r.dmax, r.winners.len());
    Ok(())
}
