//! Collision-free per-thread community-weight accumulator.
//!
//! Each thread owns one [`ScanAccumulator`]: a dense list of touched
//! community ids plus a full-size value array indexed directly by id, so
//! lookups never collide or probe. The value storage is held in
//! 128-byte-aligned cache lines, keeping different threads' arrays off
//! each other's cache lines. `clear` resets only the touched entries,
//! which is what makes the full-size array affordable across millions of
//! scans.

use crate::algo::view::Adjacency;
use crate::metrics::delta_modularity_unchecked;

const LINE: usize = 16;

/// One cache line of values; the alignment keeps separately allocated
/// accumulators from sharing a line.
#[repr(C, align(128))]
#[derive(Clone, Copy)]
struct ValueLine([f64; LINE]);

/// How a vertex's own entries are treated during a scan.
#[derive(Clone, Copy, PartialEq)]
pub(crate) enum ScanMode {
    /// Local moving: skip `j == i` entries entirely, so `K_{i->c}` never
    /// includes a self-loop.
    SkipSelf,
    /// Count a self-loop entry once (the public operation's contract).
    IncludeSelf,
    /// Aggregation: count a self-loop entry twice, so the accumulated
    /// own-community value is exactly `sigma_c` and halving it on emit
    /// conserves total weight.
    SelfDoubled,
}

pub struct ScanAccumulator {
    values: Vec<ValueLine>,
    touched: Vec<bool>,
    keys: Vec<usize>,
    capacity: usize,
}

impl ScanAccumulator {
    /// An accumulator able to index community ids below `capacity`.
    pub fn new(capacity: usize) -> Self {
        ScanAccumulator {
            values: vec![ValueLine([0.0; LINE]); capacity.div_ceil(LINE)],
            touched: vec![false; capacity],
            keys: Vec::new(),
            capacity,
        }
    }

    /// Adjusts the logical capacity for the current graph. Shrinking keeps
    /// the allocation; growing extends it with zeroed lines.
    pub fn resize(&mut self, capacity: usize) {
        self.clear();
        if capacity > self.touched.len() {
            self.values
                .resize(capacity.div_ceil(LINE), ValueLine([0.0; LINE]));
            self.touched.resize(capacity, false);
        }
        self.capacity = capacity;
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Community ids touched since the last clear, in first-touch order.
    pub fn keys(&self) -> &[usize] {
        &self.keys
    }

    /// Accumulated weight for `key`; zero if untouched.
    #[inline]
    pub fn value(&self, key: usize) -> f64 {
        self.values[key / LINE].0[key % LINE]
    }

    /// Adds `weight` to `key`, recording the key on first touch (even for
    /// a zero weight, so zero-weight edges are not dropped).
    #[inline]
    pub fn accumulate(&mut self, key: usize, weight: f64) {
        debug_assert!(key < self.capacity);
        if !self.touched[key] {
            self.touched[key] = true;
            self.keys.push(key);
        }
        self.values[key / LINE].0[key % LINE] += weight;
    }

    /// Resets exactly the entries named in the key list.
    pub fn clear(&mut self) {
        for &key in &self.keys {
            self.values[key / LINE].0[key % LINE] = 0.0;
            self.touched[key] = false;
        }
        self.keys.clear();
    }
}

/// Accumulates vertex `i`'s edge weights by the community of the far
/// endpoint, with `community_of` abstracting over plain and atomic
/// membership storage.
#[inline]
pub(crate) fn scan_vertex<A: Adjacency>(
    g: &A,
    community_of: impl Fn(usize) -> usize,
    i: usize,
    mode: ScanMode,
    acc: &mut ScanAccumulator,
) {
    let (targets, weights) = g.adjacency(i);
    for (&j, &w) in targets.iter().zip(weights) {
        if j == i {
            match mode {
                ScanMode::SkipSelf => continue,
                ScanMode::IncludeSelf => acc.accumulate(community_of(j), w),
                ScanMode::SelfDoubled => acc.accumulate(community_of(j), 2.0 * w),
            }
        } else {
            acc.accumulate(community_of(j), w);
        }
    }
}

/// Picks the positive-gain move target among the scanned communities.
///
/// Ties on the exact gain break toward the lowest community id; with no
/// strictly positive candidate the vertex stays put and the gain is zero.
/// `sigma_d_excl` is the current community's total with `K_i` removed.
#[inline]
pub(crate) fn best_among(
    acc: &ScanAccumulator,
    current: usize,
    k_i: f64,
    sigma_d_excl: f64,
    sigma_of: impl Fn(usize) -> f64,
    m: f64,
) -> (usize, f64) {
    let k_to_d = acc.value(current);
    let mut best = current;
    let mut best_gain = 0.0;
    for &c in acc.keys() {
        if c == current {
            continue;
        }
        let gain =
            delta_modularity_unchecked(m, k_i, acc.value(c), k_to_d, sigma_of(c), sigma_d_excl);
        if gain <= 0.0 {
            continue;
        }
        if gain > best_gain || (gain == best_gain && c < best) {
            best = c;
            best_gain = gain;
        }
    }
    (best, best_gain)
}
