//! Collapse a partitioned graph into its super-vertex graph.
//!
//! Run with: `cargo run --example aggregate_supergraph`

use louvain::synthetic;
use louvain::{aggregate, local_move, modularity, renumber, LouvainParams, Membership};

fn main() {
    let graph = synthetic::planted_partition(4, 8, 0.7, 0.05, 7);
    println!(
        "planted graph: {} vertices, {} edges, total weight {}",
        graph.order(),
        graph.undirected_edge_count(),
        graph.total_weight()
    );

    // One local-moving phase from singletons, then aggregate.
    let mut memb = Membership::identity(graph.order());
    let iterations = local_move(&graph, &mut memb, 0.01, &LouvainParams::default());
    let communities = renumber(&mut memb);
    println!("local moving: {iterations} iterations, {communities} communities");

    let super_graph = aggregate(&graph, &memb);
    println!(
        "super-vertex graph: {} vertices, {} stored entries, total weight {}",
        super_graph.order(),
        super_graph.entry_count(),
        super_graph.total_weight()
    );
    for v in 0..super_graph.order() {
        let (targets, weights) = super_graph.adjacency(v);
        println!(
            "  super-vertex {v}: {:?}",
            targets.iter().zip(weights).collect::<Vec<_>>()
        );
    }

    // Aggregation invariants: total weight conserved, quality preserved.
    let q = modularity(&graph, &memb).unwrap();
    let q_super = modularity(&super_graph, &Membership::identity(super_graph.order())).unwrap();
    println!("Q on original = {q:.9}");
    println!("Q of identity on super-graph = {q_super:.9}");
}
