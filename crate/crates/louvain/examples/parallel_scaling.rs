//! Thread-scaling sweep on a synthetic clustered graph, with per-phase
//! time splits.
//!
//! Run with: `cargo run --release --example parallel_scaling`

use std::time::Instant;

use louvain::synthetic;
use louvain::{louvain, LouvainParams};

fn main() {
    let graph = synthetic::planted_partition(50, 100, 0.35, 0.002, 99);
    println!(
        "planted graph: {} vertices, {} edges",
        graph.order(),
        graph.undirected_edge_count()
    );
    println!(
        "host reports {} available cores\n",
        std::thread::available_parallelism()
            .map(|c| c.get())
            .unwrap_or(1)
    );

    println!(
        "{:>7} {:>9} {:>12} {:>12} {:>9} {:>10} {:>8}",
        "threads", "total_s", "local_mov_s", "aggregate_s", "other_s", "modularity", "speedup"
    );
    let mut baseline = None;
    for threads in [1usize, 2, 4, 8] {
        let params = LouvainParams {
            thread_count: threads,
            ..LouvainParams::default()
        };
        let started = Instant::now();
        let result = louvain(&graph, &params).unwrap();
        let total = started.elapsed().as_secs_f64();
        let baseline = *baseline.get_or_insert(total);
        println!(
            "{threads:>7} {total:>9.4} {:>12.4} {:>12.4} {:>9.4} {:>10.6} {:>8.2}",
            result.timings.local_moving.as_secs_f64(),
            result.timings.aggregation.as_secs_f64(),
            result.timings.other.as_secs_f64(),
            result.modularity.unwrap(),
            baseline / total,
        );
    }
}
