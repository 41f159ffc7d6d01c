//! Aggregation phase: collapse each community into a super-vertex.
//!
//! Three stages, all allocation-free against preallocated buffers:
//!
//! 1. member counts per community + exclusive scan -> a community-members
//!    CSR, populated in parallel with atomically claimed slots;
//! 2. per-community total member degree + exclusive scan -> over-estimated
//!    slice offsets for the super-vertex graph (the holey CSR);
//! 3. per community, scan every member's edges into the thread's
//!    accumulator and emit one edge per touched community into the
//!    community's slice.
//!
//! A community's internal weight surfaces as a self-loop stored once with
//! half its accumulated (ordered-pair) value, which keeps the total weight
//! of the super-vertex graph equal to the input's.

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::algo::accumulator::{scan_vertex, ScanAccumulator, ScanMode};
use crate::algo::sync::{par_for_light, par_for_with, AtomicF64, UnsafeSlice};
use crate::algo::view::{Adjacency, HoleyCsr};
use crate::graph::CsrGraph;
use crate::metrics::{count_communities, Membership};

/// Exclusive prefix sum: `offsets[k] = sum(counts[..k])`. Returns the
/// offsets (same length as the input) and the grand total.
pub fn exclusive_scan(counts: &[usize]) -> (Vec<usize>, usize) {
    let mut offsets = vec![0usize; counts.len()];
    let total = exclusive_scan_into(|i| counts[i], counts.len(), &mut offsets, 1);
    (offsets, total)
}

/// Parallel exclusive scan into a caller-provided buffer; bit-identical to
/// the sequential result. Splits the index space statically, scans the
/// per-range totals, then finishes each range against its base.
pub(crate) fn exclusive_scan_into(
    count_of: impl Fn(usize) -> usize + Sync,
    n: usize,
    out: &mut [usize],
    threads: usize,
) -> usize {
    assert!(out.len() >= n);
    if threads <= 1 || n < 8192 {
        let mut sum = 0usize;
        for (i, slot) in out[..n].iter_mut().enumerate() {
            *slot = sum;
            sum += count_of(i);
        }
        return sum;
    }

    let span = n.div_ceil(threads);
    let mut partials = vec![0usize; threads];
    std::thread::scope(|scope| {
        for (tid, partial) in partials.iter_mut().enumerate() {
            let count_of = &count_of;
            scope.spawn(move || {
                let lo = (tid * span).min(n);
                let hi = ((tid + 1) * span).min(n);
                *partial = (lo..hi).map(count_of).sum();
            });
        }
    });

    let mut total = 0usize;
    let bases: Vec<usize> = partials
        .iter()
        .map(|&p| {
            let base = total;
            total += p;
            base
        })
        .collect();

    std::thread::scope(|scope| {
        for (tid, chunk) in out[..n].chunks_mut(span).enumerate() {
            let count_of = &count_of;
            let mut sum = bases[tid];
            scope.spawn(move || {
                for (k, slot) in chunk.iter_mut().enumerate() {
                    *slot = sum;
                    sum += count_of(tid * span + k);
                }
            });
        }
    });
    total
}

/// A community is a coarse work unit (its cost is its members' total
/// degree), so the per-community stage claims far fewer of them at a time
/// than the per-vertex loops do.
const COMMUNITY_CHUNK: usize = 64;

/// Scratch arrays for aggregation, allocated once at the original graph's
/// size and reused every pass.
pub(crate) struct AggregateScratch {
    /// Member count per community, then reused as placement cursors.
    counts: Vec<AtomicUsize>,
    /// Start of each community's member run.
    member_offsets: Vec<usize>,
    /// Vertices grouped by community (the community-members CSR).
    members: Vec<usize>,
    /// Summed member degrees per community (the degree over-estimate).
    degree: Vec<AtomicUsize>,
}

impl AggregateScratch {
    pub fn new(max_order: usize) -> Self {
        AggregateScratch {
            counts: (0..max_order).map(|_| AtomicUsize::new(0)).collect(),
            member_offsets: vec![0; max_order],
            members: vec![0; max_order],
            degree: (0..max_order).map(|_| AtomicUsize::new(0)).collect(),
        }
    }
}

/// Builds the super-vertex graph of `g` under a dense renumbered
/// membership into `out`'s preallocated buffers.
pub(crate) fn aggregate_engine<A: Adjacency>(
    g: &A,
    community_of: impl Fn(usize) -> usize + Sync,
    communities: usize,
    out: &mut HoleyCsr,
    scratch: &mut AggregateScratch,
    accumulators: &mut [ScanAccumulator],
) {
    let n = g.order();
    let threads = accumulators.len();
    debug_assert!(communities <= n);

    // Stage 1: member counts, offsets, and placement.
    par_for_light(communities, threads, |range| {
        for c in range {
            scratch.counts[c].store(0, Ordering::Relaxed);
            scratch.degree[c].store(0, Ordering::Relaxed);
        }
    });
    par_for_light(n, threads, |range| {
        for i in range {
            let c = community_of(i);
            scratch.counts[c].fetch_add(1, Ordering::Relaxed);
            scratch.degree[c].fetch_add(g.degree(i), Ordering::Relaxed);
        }
    });
    let placed = exclusive_scan_into(
        |c| scratch.counts[c].load(Ordering::Relaxed),
        communities,
        &mut scratch.member_offsets,
        threads,
    );
    debug_assert_eq!(placed, n);
    par_for_light(communities, threads, |range| {
        for c in range {
            scratch.counts[c].store(scratch.member_offsets[c], Ordering::Relaxed);
        }
    });
    {
        let members = UnsafeSlice::new(&mut scratch.members);
        par_for_light(n, threads, |range| {
            for i in range {
                let slot = scratch.counts[community_of(i)].fetch_add(1, Ordering::Relaxed);
                // Each slot index is claimed exactly once.
                unsafe { members.write(slot, i) };
            }
        });
    }

    // Stage 2: over-estimated slice offsets for the holey CSR.
    let total_slots = exclusive_scan_into(
        |c| scratch.degree[c].load(Ordering::Relaxed),
        communities,
        &mut out.begin[..communities],
        threads,
    );
    debug_assert!(total_slots <= out.edges.len());

    // Stage 3: scan members and emit merged edges per community.
    let twice_total = AtomicF64::new(0.0);
    {
        let lens = UnsafeSlice::new(&mut out.len);
        let edges = UnsafeSlice::new(&mut out.edges);
        let weights = UnsafeSlice::new(&mut out.weights);
        let begin = &out.begin;
        let members = &scratch.members;
        let member_offsets = &scratch.member_offsets;
        par_for_with(communities, COMMUNITY_CHUNK, accumulators, |acc, range| {
            let mut local_twice_total = 0.0;
            for c in range {
                acc.clear();
                let lo = member_offsets[c];
                let run_end = if c + 1 < communities {
                    member_offsets[c + 1]
                } else {
                    n
                };
                for &i in &members[lo..run_end] {
                    scan_vertex(g, &community_of, i, ScanMode::SelfDoubled, acc);
                }
                let base = begin[c];
                for (slot, &d) in acc.keys().iter().enumerate() {
                    let value = acc.value(d);
                    local_twice_total += value;
                    let w = if d == c { 0.5 * value } else { value };
                    // Slices of distinct communities are disjoint by the
                    // exclusive-scan construction.
                    unsafe {
                        edges.write(base + slot, d);
                        weights.write(base + slot, w);
                    }
                }
                unsafe { lens.write(c, acc.keys().len()) };
            }
            twice_total.fetch_add(local_twice_total);
        });
    }

    out.order = communities;
    out.total_weight = twice_total.load() / 2.0;
}

/// Aggregates the graph under a dense renumbered membership into a new
/// canonical [`CsrGraph`] (deterministic: runs single-threaded and sorts
/// each super-vertex's adjacency).
///
/// Total weight is conserved exactly up to floating-point rounding, and
/// the modularity of `memb` on `g` equals the modularity of the identity
/// membership on the result.
pub fn aggregate(g: &CsrGraph, memb: &Membership) -> CsrGraph {
    assert_eq!(memb.len(), g.order(), "membership must cover the graph");
    let communities = memb.max_id().map_or(0, |m| m + 1);
    assert_eq!(
        count_communities(memb),
        communities,
        "membership must be dense renumbered"
    );

    let mut out = HoleyCsr::with_capacity(g.order(), g.entry_count());
    let mut scratch = AggregateScratch::new(g.order());
    let mut accumulators = vec![ScanAccumulator::new(communities)];
    aggregate_engine(
        g,
        |i| memb[i],
        communities,
        &mut out,
        &mut scratch,
        &mut accumulators,
    );
    out.to_csr()
}
