//! Detect communities in the bundled karate club graph.
//!
//! Run with: `cargo run --example detect_karate`

use std::path::PathBuf;

use louvain::{build_csr, load_matrix_market, louvain, LouvainParams};

fn main() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/karate.mtx");
    let graph = build_csr(&load_matrix_market(&path).expect("bundled fixture parses"));
    println!(
        "loaded {}: {} vertices, {} edges",
        path.display(),
        graph.order(),
        graph.undirected_edge_count()
    );

    let result = louvain(&graph, &LouvainParams::default()).expect("default parameters are valid");
    println!("modularity: {:.6}", result.modularity.unwrap());
    println!(
        "passes: {} (iterations {:?})",
        result.passes, result.iterations_per_pass
    );

    let count = result.community_count();
    println!("communities: {count}");
    for c in 0..count {
        let members: Vec<usize> = (0..graph.order())
            .filter(|&v| result.membership[v] == c)
            .collect();
        println!("  community {c}: {members:?}");
    }
}
