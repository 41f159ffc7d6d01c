//! Compare the solver against brute-force optimal partitions on tiny
//! graphs (every set partition enumerated and scored).
//!
//! Run with: `cargo run --example exhaustive_check`

use louvain::oracle::best_partition_exhaustive;
use louvain::synthetic::{self, SplitMix64};
use louvain::{louvain, LouvainParams};

fn main() {
    let params = LouvainParams::default();
    let mut rng = SplitMix64::new(2024);

    println!(
        "{:<22} {:>10} {:>10} {:>7}",
        "graph", "louvain Q", "optimum Q", "ratio"
    );
    let mut cases: Vec<(String, louvain::CsrGraph)> = vec![
        ("triangle".into(), synthetic::triangle()),
        ("barbell".into(), synthetic::barbell()),
        ("two 4-cliques".into(), synthetic::two_cliques(4)),
        ("path(7)".into(), synthetic::path(7)),
        ("cycle(8)".into(), synthetic::cycle(8)),
        ("star(8)".into(), synthetic::star(8)),
    ];
    for i in 0..6 {
        let n = 5 + i % 4;
        cases.push((
            format!("random connected #{i}"),
            synthetic::connected_gnp(n, 0.5, rng.next_u64()),
        ));
    }

    for (name, graph) in cases {
        let achieved = louvain(&graph, &params).unwrap().modularity.unwrap();
        let (_, optimum) = best_partition_exhaustive(&graph).unwrap();
        if optimum > 1e-9 {
            println!(
                "{name:<22} {achieved:>10.6} {optimum:>10.6} {:>7.3}",
                achieved / optimum
            );
        } else {
            println!("{name:<22} {achieved:>10.6} {optimum:>10.6} {:>7}", "-");
        }
    }
}
