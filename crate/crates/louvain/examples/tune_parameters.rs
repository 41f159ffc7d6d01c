//! Effect of each optimization knob on runtime and quality: vertex
//! pruning, iteration cap, threshold scaling, initial tolerance, and
//! aggregation tolerance.
//!
//! Run with: `cargo run --release --example tune_parameters`

use std::time::Instant;

use louvain::synthetic;
use louvain::{louvain, CsrGraph, LouvainParams};

fn measure(graph: &CsrGraph, name: &str, params: &LouvainParams) {
    // Geometric mean over a few repeats to smooth scheduler noise.
    let repeats = 5;
    let mut log_sum = 0.0;
    let mut result = None;
    for _ in 0..repeats {
        let started = Instant::now();
        result = Some(louvain(graph, params).unwrap());
        log_sum += started.elapsed().as_secs_f64().max(1e-9).ln();
    }
    let result = result.unwrap();
    println!(
        "{name:<34} {:>9.4} {:>10.6} {:>7}",
        (log_sum / repeats as f64).exp(),
        result.modularity.unwrap(),
        result.passes,
    );
}

fn main() {
    let graph = synthetic::planted_partition(40, 60, 0.3, 0.004, 4242);
    println!(
        "planted graph: {} vertices, {} edges\n",
        graph.order(),
        graph.undirected_edge_count()
    );
    println!(
        "{:<34} {:>9} {:>10} {:>7}",
        "configuration", "time_s", "modularity", "passes"
    );

    let base = LouvainParams::default();
    measure(&graph, "defaults (tuned)", &base);
    measure(
        &graph,
        "no vertex pruning",
        &LouvainParams {
            pruning: false,
            ..base.clone()
        },
    );
    measure(
        &graph,
        "iteration cap 100",
        &LouvainParams {
            max_iterations: 100,
            ..base.clone()
        },
    );
    measure(
        &graph,
        "threshold scaling off (drop 1)",
        &LouvainParams {
            tolerance_drop: 1.0,
            ..base.clone()
        },
    );
    measure(
        &graph,
        "initial tolerance 1e-6",
        &LouvainParams {
            initial_tolerance: 1e-6,
            ..base.clone()
        },
    );
    measure(
        &graph,
        "aggregation tolerance off (1.0)",
        &LouvainParams {
            aggregation_tolerance: 1.0,
            ..base.clone()
        },
    );
}
