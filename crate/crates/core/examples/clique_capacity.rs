//! Largest probability that two independent draws land on adjacent vertices.

use maxdiv::graph::adjacent_pair_mass;
use maxdiv::{clique_capacity, Distribution, IrreflexiveGraph};

fn main() -> maxdiv::Result<()> {
    // triangle 0-1-2 with a pendant 3 attached to 2
    let x = IrreflexiveGraph::new(4, [(0, 1), (1, 2), (0, 2), (2, 3)])?;
    let c = clique_capacity(&x);

    println!("omega = {}, clique {:?}", c.clique_number, c.clique);
    println!("capacity = 1 - 1/omega = {:.6}", c.value);
    println!("attained by {:?}", c.witness.probs());

    let uniform = Distribution::uniform(4);
    println!("uniform gives only {:.6}", adjacent_pair_mass(&x, &uniform)?);
    Ok(())
}
