//! Modularity, both evaluation routes, and O(1) move gains.
//!
//! Run with: `cargo run --example metrics_tour`

use louvain::synthetic;
use louvain::{community_weights, modularity, modularity_edge_form, move_gain, Membership};

fn main() {
    let graph = synthetic::barbell();
    let split = Membership::from_vec(vec![0, 0, 0, 1, 1, 1]);

    let q = modularity(&graph, &split).unwrap();
    let q_pairwise = modularity_edge_form(&graph, &split).unwrap();
    println!("barbell, two triangles: Q = {q:.9} (pairwise route {q_pairwise:.9})");

    let weights = community_weights(&graph, &split).unwrap();
    println!(
        "sigma = {:?}, Sigma = {:?}",
        weights.sigma, weights.big_sigma
    );

    // The O(1) gain formula against a full recomputation, for every
    // possible single move.
    println!("\nvertex moves from the optimum (all should lose):");
    for vertex in 0..graph.order() {
        let target = 1 - split[vertex];
        let gain = move_gain(&graph, &split, &weights, vertex, target).unwrap();

        let mut moved = split.clone();
        moved.set(vertex, target);
        let recomputed = modularity(&graph, &moved).unwrap() - q;
        println!(
            "  move {vertex} -> community {target}: gain {gain:+.6} (recomputed {recomputed:+.6})"
        );
    }
}
