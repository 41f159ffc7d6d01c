//! The optimized parallel Louvain solver.
//!
//! Each pass runs an asynchronous local-moving phase over the current
//! graph, renumbers the resulting communities, folds them into the
//! top-level membership, and aggregates the graph into super-vertices for
//! the next pass. Passes stop on global convergence (local moving settles
//! in a single iteration), when too few communities merged (the
//! aggregation tolerance), or at the pass cap. The convergence tolerance
//! tightens by a fixed factor after every aggregation (threshold scaling).

mod accumulator;
mod aggregate;
mod local_move;
mod sync;
mod view;

pub use accumulator::ScanAccumulator;
pub use aggregate::{aggregate, exclusive_scan};
pub use local_move::{local_move, PruneFlags};

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::graph::CsrGraph;
use crate::metrics::{modularity, Membership};

use accumulator::{best_among, scan_vertex, ScanMode};
use aggregate::{aggregate_engine, exclusive_scan_into, AggregateScratch};
use local_move::{local_move_engine, MoveCtx};
use sync::{par_for, par_for_light, AtomicF64, UnsafeSlice};
use view::{Adjacency, HoleyCsr, PassGraph};

#[derive(Debug, Error, PartialEq)]
pub enum LouvainError {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
}

/// Tunable knobs of the solver, defaulting to the tuned values:
/// at most 20 local-moving iterations per pass, an initial tolerance of
/// 0.01 dropping 10x per pass, an aggregation tolerance of 0.8, and
/// dynamic scheduling with chunks of 2048 vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct LouvainParams {
    /// Upper bound on passes; desk-scale graphs converge well before 10.
    pub max_passes: usize,
    /// Iteration cap for each local-moving phase.
    pub max_iterations: usize,
    /// Convergence tolerance of the first pass, on the per-iteration
    /// accumulated delta-modularity.
    pub initial_tolerance: f64,
    /// Factor the tolerance is divided by after each pass (threshold
    /// scaling); 1 disables scaling.
    pub tolerance_drop: f64,
    /// Stop when `communities / vertices` after a pass is at or above
    /// this ratio; 1 disables the early stop.
    pub aggregation_tolerance: f64,
    /// Vertices claimed per grab from the shared work cursor.
    pub chunk_size: usize,
    /// Worker threads; 1 selects the deterministic sequential path.
    pub thread_count: usize,
    /// Vertex pruning: skip vertices whose neighborhood has not changed
    /// since they were last examined.
    pub pruning: bool,
}

impl Default for LouvainParams {
    fn default() -> Self {
        LouvainParams {
            max_passes: 10,
            max_iterations: 20,
            initial_tolerance: 0.01,
            tolerance_drop: 10.0,
            aggregation_tolerance: 0.8,
            chunk_size: 2048,
            thread_count: 1,
            pruning: true,
        }
    }
}

impl LouvainParams {
    pub fn validate(&self) -> Result<(), LouvainError> {
        if self.max_passes == 0
            || self.max_iterations == 0
            || self.chunk_size == 0
            || self.thread_count == 0
        {
            return Err(LouvainError::InvalidParams(
                "max_passes, max_iterations, chunk_size and thread_count must be at least 1".into(),
            ));
        }
        if self.initial_tolerance <= 0.0 || !self.initial_tolerance.is_finite() {
            return Err(LouvainError::InvalidParams(
                "initial_tolerance must be positive".into(),
            ));
        }
        if self.tolerance_drop < 1.0 || self.tolerance_drop.is_nan() {
            return Err(LouvainError::InvalidParams(
                "tolerance_drop must be at least 1".into(),
            ));
        }
        if self.aggregation_tolerance <= 0.0
            || self.aggregation_tolerance > 1.0
            || self.aggregation_tolerance.is_nan()
        {
            return Err(LouvainError::InvalidParams(
                "aggregation_tolerance must be in (0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Wall-clock split of a run: the two algorithm phases plus everything
/// else (initialization, renumbering, dendrogram lookups, resets).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTimings {
    pub local_moving: Duration,
    pub aggregation: Duration,
    pub other: Duration,
    pub total: Duration,
}

/// Outcome of a [`louvain`] run.
#[derive(Debug, Clone)]
pub struct LouvainResult {
    /// Final community of every original vertex, renumbered to a dense
    /// `[0, community_count)` range.
    pub membership: Membership,
    /// Modularity of `membership` on the input graph, recomputed from
    /// scratch; `None` when the graph has no edge weight.
    pub modularity: Option<f64>,
    /// Passes executed.
    pub passes: usize,
    /// Local-moving iterations of each pass.
    pub iterations_per_pass: Vec<usize>,
    /// Community count after each pass.
    pub communities_per_pass: Vec<usize>,
    /// Convergence tolerance each pass ran with.
    pub tolerances_per_pass: Vec<f64>,
    pub timings: PhaseTimings,
}

impl LouvainResult {
    /// Number of communities in the final membership.
    pub fn community_count(&self) -> usize {
        self.communities_per_pass
            .last()
            .copied()
            .unwrap_or(self.membership.len())
    }
}

/// Accumulates vertex `vertex`'s edge weights by the community of the far
/// endpoint. With `include_self` false, `j == vertex` entries are skipped
/// (local-moving); with it true a self-loop entry counts once.
pub fn scan_communities(
    g: &CsrGraph,
    memb: &Membership,
    vertex: usize,
    include_self: bool,
    acc: &mut ScanAccumulator,
) {
    assert_eq!(memb.len(), g.order(), "membership must cover the graph");
    let mode = if include_self {
        ScanMode::IncludeSelf
    } else {
        ScanMode::SkipSelf
    };
    scan_vertex(g, |j| memb[j], vertex, mode, acc);
}

/// Best move target for a vertex whose neighborhood was scanned with
/// [`scan_communities`] (`include_self` false).
///
/// `sigma` holds full community totals including the vertex's own; the
/// current community's total is taken exclusive of `k_i` internally.
/// Returns `(current, 0.0)` when no strictly positive move exists; exact
/// gain ties break to the lowest community id.
pub fn best_community(
    acc: &ScanAccumulator,
    current: usize,
    k_i: f64,
    sigma: &[f64],
    total_weight: f64,
) -> (usize, f64) {
    assert!(total_weight > 0.0, "total weight must be positive");
    best_among(
        acc,
        current,
        k_i,
        sigma[current] - k_i,
        |c| sigma[c],
        total_weight,
    )
}

/// Renumbers community ids to the dense range `[0, count)`, assigned in
/// ascending order of old id, and returns the count. The partition itself
/// is unchanged.
pub fn renumber(memb: &mut Membership) -> usize {
    let Some(max) = memb.max_id() else {
        return 0;
    };
    let mut newid = vec![usize::MAX; max + 1];
    for c in memb.iter() {
        newid[c] = 0;
    }
    let mut count = 0;
    for slot in newid.iter_mut() {
        if *slot == 0 {
            *slot = count;
            count += 1;
        }
    }
    for i in 0..memb.len() {
        let dense = newid[memb[i]];
        memb.set(i, dense);
    }
    count
}

/// Composes one dendrogram level into the top-level membership:
/// `top[i] = level[top[i]]`. Panics if a value in `top` is not a valid
/// index into `level`.
pub fn lookup_dendrogram(top: &mut Membership, level: &Membership) {
    for i in 0..top.len() {
        let c = top[i];
        assert!(
            c < level.len(),
            "community {c} is out of range for a level of {}",
            level.len()
        );
        top.set(i, level[c]);
    }
}

/// Runs the full multi-pass algorithm and returns the final membership
/// with per-pass statistics.
///
/// Graphs with no vertices or no edge weight skip the passes and come
/// back with the identity membership and `modularity: None`.
pub fn louvain(g: &CsrGraph, params: &LouvainParams) -> Result<LouvainResult, LouvainError> {
    params.validate()?;
    let started = Instant::now();
    let n = g.order();

    if n == 0 || g.total_weight() == 0.0 {
        return Ok(LouvainResult {
            membership: Membership::identity(n),
            modularity: None,
            passes: 0,
            iterations_per_pass: Vec::new(),
            communities_per_pass: Vec::new(),
            tolerances_per_pass: Vec::new(),
            timings: PhaseTimings::default(),
        });
    }

    let threads = params.thread_count;
    let chunk = params.chunk_size;

    // All working storage is allocated once at the original graph's size
    // and reused (logically shrunk) each pass.
    let mut top: Vec<usize> = (0..n).collect();
    let memb: Vec<AtomicUsize> = (0..n).map(AtomicUsize::new).collect();
    let sigma: Vec<AtomicF64> = (0..n).map(|_| AtomicF64::new(0.0)).collect();
    let mut k = vec![0.0f64; n];
    let flags = PruneFlags::new(n);
    let mut work_a = HoleyCsr::with_capacity(n, g.entry_count());
    let mut work_b = HoleyCsr::with_capacity(n, g.entry_count());
    let mut scratch = AggregateScratch::new(n);
    let mut accumulators: Vec<ScanAccumulator> =
        (0..threads).map(|_| ScanAccumulator::new(n)).collect();
    let present: Vec<AtomicUsize> = (0..n).map(|_| AtomicUsize::new(0)).collect();
    let mut dense_id = vec![0usize; n];

    let mut tolerance = params.initial_tolerance;
    let mut iterations_per_pass = Vec::new();
    let mut communities_per_pass = Vec::new();
    let mut tolerances_per_pass = Vec::new();
    let mut time_local = Duration::ZERO;
    let mut time_agg = Duration::ZERO;

    for pass in 0..params.max_passes {
        let cur = if pass == 0 {
            PassGraph::Original(g)
        } else {
            PassGraph::Work(&work_a)
        };
        let order = cur.order();
        let m = cur.total_weight();

        // Reset K', Sigma', C' and the prune flags on the current graph.
        {
            let kw = UnsafeSlice::new(&mut k);
            par_for(order, chunk, threads, |range| {
                for i in range {
                    let wd = cur.weighted_degree(i);
                    unsafe { kw.write(i, wd) };
                    sigma[i].store(wd);
                    memb[i].store(i, Ordering::Relaxed);
                    flags.mark_unprocessed(i);
                }
            });
        }

        tolerances_per_pass.push(tolerance);
        let t0 = Instant::now();
        for acc in accumulators.iter_mut() {
            acc.resize(order);
        }
        let ctx = MoveCtx {
            memb: &memb[..order],
            sigma: &sigma[..order],
            k: &k[..order],
            flags: &flags,
            m,
            tolerance,
            max_iterations: params.max_iterations,
            chunk,
            pruning: params.pruning,
        };
        let iterations = local_move_engine(&cur, &ctx, &mut accumulators);
        time_local += t0.elapsed();
        iterations_per_pass.push(iterations);

        let count = renumber_in_place(&memb[..order], &present, &mut dense_id, threads);
        communities_per_pass.push(count);

        // Fold this pass's communities into the top-level membership.
        {
            let topw = UnsafeSlice::new(&mut top);
            par_for_light(n, threads, |range| {
                for v in range {
                    let c = unsafe { topw.read(v) };
                    unsafe { topw.write(v, memb[c].load(Ordering::Relaxed)) };
                }
            });
        }

        if iterations <= 1 {
            break; // local moving settled immediately: global convergence
        }
        if count as f64 / order as f64 >= params.aggregation_tolerance {
            break; // too few communities merged this pass
        }

        let t1 = Instant::now();
        for acc in accumulators.iter_mut() {
            acc.resize(count);
        }
        aggregate_engine(
            &cur,
            |i| memb[i].load(Ordering::Relaxed),
            count,
            &mut work_b,
            &mut scratch,
            &mut accumulators,
        );
        time_agg += t1.elapsed();
        debug_assert!(
            (work_b.total_weight - m).abs() <= 1e-9 * m,
            "aggregation lost weight: {} vs {m}",
            work_b.total_weight
        );

        std::mem::swap(&mut work_a, &mut work_b);
        tolerance /= params.tolerance_drop;
    }

    let membership = Membership::from_vec(top);
    let q = modularity(g, &membership).expect("total weight is positive here");
    let total = started.elapsed();
    let other = total.saturating_sub(time_local).saturating_sub(time_agg);

    Ok(LouvainResult {
        membership,
        modularity: Some(q),
        passes: iterations_per_pass.len(),
        iterations_per_pass,
        communities_per_pass,
        tolerances_per_pass,
        timings: PhaseTimings {
            local_moving: time_local,
            aggregation: time_agg,
            other,
            total,
        },
    })
}

/// Renumbers the atomic membership prefix to dense ids in ascending order
/// of old id; deterministic regardless of thread interleaving because it
/// is presence-based.
fn renumber_in_place(
    memb: &[AtomicUsize],
    present: &[AtomicUsize],
    dense_id: &mut [usize],
    threads: usize,
) -> usize {
    let order = memb.len();
    par_for_light(order, threads, |range| {
        for i in range {
            present[memb[i].load(Ordering::Relaxed)].store(1, Ordering::Relaxed);
        }
    });
    let count = exclusive_scan_into(
        |c| present[c].load(Ordering::Relaxed),
        order,
        dense_id,
        threads,
    );
    let dense_id = &*dense_id;
    par_for_light(order, threads, |range| {
        for i in range {
            let old = memb[i].load(Ordering::Relaxed);
            memb[i].store(dense_id[old], Ordering::Relaxed);
            present[old].store(0, Ordering::Relaxed);
        }
    });
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_csr, EdgeList};

    fn barbell() -> CsrGraph {
        build_csr(&EdgeList::from_entries(
            6,
            [
                (0, 1, 1.0),
                (1, 2, 1.0),
                (0, 2, 1.0),
                (2, 3, 1.0),
                (3, 4, 1.0),
                (4, 5, 1.0),
                (3, 5, 1.0),
            ],
        ))
    }

    #[test]
    fn renumber_examples() {
        let mut memb = Membership::from_vec(vec![5, 5, 2, 9, 2]);
        assert_eq!(renumber(&mut memb), 3);
        assert_eq!(memb.as_slice(), &[1, 1, 0, 2, 0]);

        let mut memb = Membership::from_vec(vec![0, 1, 0]);
        assert_eq!(renumber(&mut memb), 2);
        assert_eq!(memb.as_slice(), &[0, 1, 0]);

        let mut memb = Membership::from_vec(vec![7, 7, 7]);
        assert_eq!(renumber(&mut memb), 1);
        assert_eq!(memb.as_slice(), &[0, 0, 0]);
    }

    #[test]
    fn lookup_dendrogram_examples() {
        let mut top = Membership::from_vec(vec![0, 0, 1, 1]);
        lookup_dendrogram(&mut top, &Membership::from_vec(vec![1, 1]));
        assert_eq!(top.as_slice(), &[1, 1, 1, 1]);

        let mut top = Membership::from_vec(vec![0, 1, 2]);
        lookup_dendrogram(&mut top, &Membership::from_vec(vec![0, 1, 2]));
        assert_eq!(top.as_slice(), &[0, 1, 2]);

        let mut top = Membership::from_vec(vec![0, 1, 2]);
        lookup_dendrogram(&mut top, &Membership::from_vec(vec![2, 0, 1]));
        assert_eq!(top.as_slice(), &[2, 0, 1]);
    }

    #[test]
    fn louvain_barbell_finds_optimum() {
        let g = barbell();
        let result = louvain(&g, &LouvainParams::default()).unwrap();
        assert_eq!(result.membership.as_slice(), &[0, 0, 0, 1, 1, 1]);
        let q = result.modularity.unwrap();
        assert!((q - 5.0 / 14.0).abs() < 1e-12, "q = {q}");
    }

    #[test]
    fn louvain_separates_disconnected_cliques() {
        let mut entries = Vec::new();
        for base in [0usize, 4] {
            for a in 0..4 {
                for b in (a + 1)..4 {
                    entries.push((base + a, base + b, 1.0));
                }
            }
        }
        let g = build_csr(&EdgeList::from_entries(8, entries));
        let result = louvain(&g, &LouvainParams::default()).unwrap();
        let memb = &result.membership;
        for v in 1..4 {
            assert_eq!(memb[v], memb[0]);
        }
        for v in 5..8 {
            assert_eq!(memb[v], memb[4]);
        }
        assert_ne!(memb[0], memb[4]);
    }

    #[test]
    fn louvain_self_loop_singleton() {
        let g = build_csr(&EdgeList::from_entries(1, [(0, 0, 2.0)]));
        let result = louvain(&g, &LouvainParams::default()).unwrap();
        assert_eq!(result.passes, 1);
        assert_eq!(result.membership.as_slice(), &[0]);
        assert!(result.modularity.unwrap().abs() < 1e-15);
    }

    #[test]
    fn louvain_degenerate_graphs() {
        let empty = build_csr(&EdgeList::new(0));
        let result = louvain(&empty, &LouvainParams::default()).unwrap();
        assert_eq!(result.passes, 0);
        assert_eq!(result.modularity, None);

        let edgeless = build_csr(&EdgeList::new(3));
        let result = louvain(&edgeless, &LouvainParams::default()).unwrap();
        assert_eq!(result.membership.as_slice(), &[0, 1, 2]);
        assert_eq!(result.modularity, None);
    }

    #[test]
    fn louvain_rejects_bad_params() {
        let g = barbell();
        let params = LouvainParams {
            tolerance_drop: 0.5,
            ..LouvainParams::default()
        };
        assert!(louvain(&g, &params).is_err());
        let params = LouvainParams {
            initial_tolerance: 0.0,
            ..LouvainParams::default()
        };
        assert!(louvain(&g, &params).is_err());
    }
}
