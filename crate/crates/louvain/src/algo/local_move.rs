//! Asynchronous parallel local-moving phase.
//!
//! Threads claim vertices in dynamic chunks and move each one greedily to
//! the neighboring community with the best delta-modularity, updating the
//! shared community totals atomically. Membership reads by other threads
//! may be stale; that is the asynchronous contract, and it trades a little
//! result variability for convergence speed. An iteration ends at a full
//! barrier; the loop stops when the iteration's accumulated gain falls to
//! the tolerance or the iteration cap is hit.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Barrier;

use crate::algo::accumulator::{best_among, scan_vertex, ScanAccumulator, ScanMode};
use crate::algo::sync::AtomicF64;
use crate::algo::view::Adjacency;
use crate::algo::LouvainParams;
use crate::graph::CsrGraph;
use crate::metrics::Membership;

/// Per-vertex processed markers for vertex pruning.
///
/// A vertex is claimed (marked processed) when examined and re-flagged
/// when a neighbor changes community. Set and clear are relaxed atomics;
/// a stale read only causes a redundant re-examination, never a permanent
/// skip within an iteration where a neighbor moved.
pub struct PruneFlags {
    processed: Vec<AtomicBool>,
}

impl PruneFlags {
    /// All vertices start unprocessed.
    pub fn new(n: usize) -> Self {
        PruneFlags {
            processed: (0..n).map(|_| AtomicBool::new(false)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.processed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.processed.is_empty()
    }

    /// Marks `i` processed; returns false if it already was.
    #[inline]
    pub fn try_claim(&self, i: usize) -> bool {
        !self.processed[i].swap(true, Ordering::Relaxed)
    }

    #[inline]
    pub fn mark_unprocessed(&self, i: usize) {
        self.processed[i].store(false, Ordering::Relaxed);
    }

    #[inline]
    pub fn is_processed(&self, i: usize) -> bool {
        self.processed[i].load(Ordering::Relaxed)
    }
}

/// Shared state of one local-moving phase over the current graph.
pub(crate) struct MoveCtx<'a> {
    pub memb: &'a [AtomicUsize],
    pub sigma: &'a [AtomicF64],
    pub k: &'a [f64],
    pub flags: &'a PruneFlags,
    pub m: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub chunk: usize,
    pub pruning: bool,
}

/// Examines one vertex; applies the best positive move and returns its
/// gain (zero when the vertex stays).
#[inline]
fn process_vertex<A: Adjacency>(g: &A, ctx: &MoveCtx, i: usize, acc: &mut ScanAccumulator) -> f64 {
    if ctx.pruning && !ctx.flags.try_claim(i) {
        return 0.0;
    }
    let (targets, _) = g.adjacency(i);
    if targets.is_empty() {
        return 0.0;
    }
    let d = ctx.memb[i].load(Ordering::Relaxed);
    let k_i = ctx.k[i];

    acc.clear();
    scan_vertex(
        g,
        |j| ctx.memb[j].load(Ordering::Relaxed),
        i,
        ScanMode::SkipSelf,
        acc,
    );

    let sigma_d_excl = ctx.sigma[d].load() - k_i;
    let (target, gain) = best_among(acc, d, k_i, sigma_d_excl, |c| ctx.sigma[c].load(), ctx.m);
    if gain > 0.0 && target != d {
        ctx.sigma[d].fetch_add(-k_i);
        ctx.sigma[target].fetch_add(k_i);
        ctx.memb[i].store(target, Ordering::Relaxed);
        if ctx.pruning {
            for &j in targets {
                ctx.flags.mark_unprocessed(j);
            }
        }
        return gain;
    }
    0.0
}

/// Runs local-moving iterations until convergence or the cap; returns the
/// number of iterations performed.
pub(crate) fn local_move_engine<A: Adjacency>(
    g: &A,
    ctx: &MoveCtx,
    accumulators: &mut [ScanAccumulator],
) -> usize {
    let n = g.order();
    // No point spawning more workers than there are chunks of work; with
    // a single chunk the sequential path is both faster and exact.
    let threads = accumulators.len().min(n.div_ceil(ctx.chunk.max(1))).max(1);
    let accumulators = &mut accumulators[..threads];

    if threads == 1 {
        let acc = &mut accumulators[0];
        let mut iterations = 0;
        loop {
            let mut total_gain = 0.0;
            for i in 0..n {
                total_gain += process_vertex(g, ctx, i, acc);
            }
            iterations += 1;
            if total_gain <= ctx.tolerance || iterations >= ctx.max_iterations {
                return iterations;
            }
        }
    }

    let barrier = Barrier::new(threads);
    let cursor = AtomicUsize::new(0);
    let total_gain = AtomicF64::new(0.0);
    let iterations = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);

    std::thread::scope(|scope| {
        for acc in accumulators.iter_mut() {
            let barrier = &barrier;
            let cursor = &cursor;
            let total_gain = &total_gain;
            let iterations = &iterations;
            let stop = &stop;
            scope.spawn(move || loop {
                let mut local_gain = 0.0;
                loop {
                    let start = cursor.fetch_add(ctx.chunk, Ordering::Relaxed);
                    if start >= n {
                        break;
                    }
                    for i in start..(start + ctx.chunk).min(n) {
                        local_gain += process_vertex(g, ctx, i, acc);
                    }
                }
                total_gain.fetch_add(local_gain);

                if barrier.wait().is_leader() {
                    let gain = total_gain.load();
                    let done = iterations.fetch_add(1, Ordering::Relaxed) + 1;
                    if gain <= ctx.tolerance || done >= ctx.max_iterations {
                        stop.store(true, Ordering::Relaxed);
                    }
                    total_gain.store(0.0);
                    cursor.store(0, Ordering::Relaxed);
                }
                barrier.wait();
                if stop.load(Ordering::Relaxed) {
                    break;
                }
            });
        }
    });

    iterations.load(Ordering::Relaxed)
}

/// One local-moving phase over `memb` at the given tolerance.
///
/// Community totals and weighted degrees are derived from the graph and
/// the membership, prune flags start all-unprocessed, and the membership
/// is updated in place. Returns the number of iterations performed; a
/// weightless graph converges trivially in one.
pub fn local_move(
    g: &CsrGraph,
    memb: &mut Membership,
    tolerance: f64,
    params: &LouvainParams,
) -> usize {
    assert_eq!(memb.len(), g.order(), "membership must cover the graph");
    let n = g.order();
    if n == 0 || g.total_weight() == 0.0 {
        return 1;
    }

    let atomic_memb: Vec<AtomicUsize> = memb.iter().map(AtomicUsize::new).collect();
    let k: Vec<f64> = (0..n).map(|i| g.weighted_degree(i)).collect();
    let sigma: Vec<AtomicF64> = (0..n).map(|_| AtomicF64::new(0.0)).collect();
    for i in 0..n {
        sigma[memb[i]].fetch_add(k[i]);
    }
    let flags = PruneFlags::new(n);
    let mut accumulators: Vec<ScanAccumulator> = (0..params.thread_count)
        .map(|_| ScanAccumulator::new(n))
        .collect();

    let ctx = MoveCtx {
        memb: &atomic_memb,
        sigma: &sigma,
        k: &k,
        flags: &flags,
        m: g.total_weight(),
        tolerance,
        max_iterations: params.max_iterations,
        chunk: params.chunk_size,
        pruning: params.pruning,
    };
    let iterations = local_move_engine(g, &ctx, &mut accumulators);

    for (i, cell) in atomic_memb.iter().enumerate() {
        memb.set(i, cell.load(Ordering::Relaxed));
    }
    iterations
}
