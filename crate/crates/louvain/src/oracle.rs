//! Slow, obviously-correct reference implementations for tests.
//!
//! Nothing here is optimized: the exhaustive search enumerates every set
//! partition of tiny graphs, and [`naive_louvain`] is the textbook
//! sequential algorithm with map-based aggregation, no pruning, no
//! iteration caps and a zero tolerance. The fast solver is checked against
//! these.

use std::collections::BTreeMap;
use std::time::Instant;

use thiserror::Error;

use crate::algo::{lookup_dendrogram, renumber, LouvainResult, PhaseTimings};
use crate::graph::{build_csr, CsrGraph, EdgeList};
use crate::metrics::{
    delta_modularity, modularity, modularity_edge_form, Membership, MetricsError,
};

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("exhaustive partition search is limited to order 12, got {0}")]
    OrderTooLarge(usize),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Iterator over all set partitions of `{0..n-1}`, encoded as restricted
/// growth strings in lexicographic order; yields exactly Bell(n) items.
pub struct PartitionEnumerator {
    rgs: Vec<usize>,
    state: EnumeratorState,
}

enum EnumeratorState {
    Fresh,
    Running,
    Done,
}

impl PartitionEnumerator {
    /// Orders above 12 are refused (Bell(13) is past what a test should
    /// ever enumerate).
    pub fn new(n: usize) -> Result<Self, OracleError> {
        if n > 12 {
            return Err(OracleError::OrderTooLarge(n));
        }
        Ok(PartitionEnumerator {
            rgs: vec![0; n],
            state: EnumeratorState::Fresh,
        })
    }

    fn advance(&mut self) -> bool {
        // Rightmost position that may be incremented while keeping the
        // growth condition rgs[i] <= 1 + max(rgs[..i]).
        for i in (1..self.rgs.len()).rev() {
            let max_before = self.rgs[..i].iter().copied().max().unwrap_or(0);
            if self.rgs[i] <= max_before {
                self.rgs[i] += 1;
                for slot in self.rgs[i + 1..].iter_mut() {
                    *slot = 0;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for PartitionEnumerator {
    type Item = Membership;

    fn next(&mut self) -> Option<Membership> {
        match self.state {
            EnumeratorState::Fresh => {
                self.state = EnumeratorState::Running;
                Some(Membership::from_vec(self.rgs.clone()))
            }
            EnumeratorState::Running => {
                if self.advance() {
                    Some(Membership::from_vec(self.rgs.clone()))
                } else {
                    self.state = EnumeratorState::Done;
                    None
                }
            }
            EnumeratorState::Done => None,
        }
    }
}

/// Globally optimal partition by brute force, scored with the pairwise
/// modularity form. Ties keep the first partition in enumeration order.
pub fn best_partition_exhaustive(g: &CsrGraph) -> Result<(Membership, f64), OracleError> {
    let mut best: Option<(Membership, f64)> = None;
    for memb in PartitionEnumerator::new(g.order())? {
        let q = modularity_edge_form(g, &memb)?;
        if best.as_ref().is_none_or(|(_, best_q)| q > *best_q) {
            best = Some((memb, q));
        }
    }
    Ok(best.expect("at least one partition exists"))
}

/// Textbook sequential Louvain: fixed 0..N vertex order, zero tolerance,
/// no iteration caps, no pruning, lowest-id tie-break, and aggregation
/// rebuilt from scratch with ordered maps.
pub fn naive_louvain(g: &CsrGraph) -> Result<LouvainResult, OracleError> {
    if g.total_weight() == 0.0 {
        return Err(MetricsError::UndefinedModularity.into());
    }
    let started = Instant::now();

    let mut top = Membership::identity(g.order());
    let mut owned: Option<CsrGraph> = None;
    let mut iterations_per_pass = Vec::new();
    let mut communities_per_pass = Vec::new();

    loop {
        let cur = owned.as_ref().unwrap_or(g);
        let (mut memb, iterations) = sweep_to_convergence(cur);
        let count = renumber(&mut memb);
        lookup_dendrogram(&mut top, &memb);
        iterations_per_pass.push(iterations);
        communities_per_pass.push(count);

        if iterations <= 1 || count == cur.order() {
            break;
        }
        owned = Some(map_aggregate(cur, &memb, count));
    }

    let q = modularity(g, &top)?;
    let total = started.elapsed();
    Ok(LouvainResult {
        membership: top,
        modularity: Some(q),
        passes: iterations_per_pass.len(),
        tolerances_per_pass: vec![0.0; iterations_per_pass.len()],
        iterations_per_pass,
        communities_per_pass,
        timings: PhaseTimings {
            total,
            ..PhaseTimings::default()
        },
    })
}

/// Full greedy sweeps until an iteration applies no move.
fn sweep_to_convergence(g: &CsrGraph) -> (Membership, usize) {
    let n = g.order();
    let m = g.total_weight();
    let mut memb = Membership::identity(n);
    let k: Vec<f64> = (0..n).map(|i| g.weighted_degree(i)).collect();
    let mut sigma = k.clone();

    let mut iterations = 0;
    loop {
        let mut total_gain = 0.0;
        for i in 0..n {
            let d = memb[i];
            let mut by_comm: BTreeMap<usize, f64> = BTreeMap::new();
            let (targets, weights) = g.adjacency(i);
            for (&j, &w) in targets.iter().zip(weights) {
                if j != i {
                    *by_comm.entry(memb[j]).or_insert(0.0) += w;
                }
            }
            let k_to_d = by_comm.get(&d).copied().unwrap_or(0.0);
            let sigma_d_excl = sigma[d] - k[i];

            let mut best = (d, 0.0);
            for (&c, &k_to_c) in &by_comm {
                if c == d {
                    continue;
                }
                let gain = delta_modularity(m, k[i], k_to_c, k_to_d, sigma[c], sigma_d_excl)
                    .expect("total weight is positive");
                // Ascending map order keeps the lowest id on exact ties.
                if gain > best.1 {
                    best = (c, gain);
                }
            }
            if best.1 > 0.0 {
                sigma[d] -= k[i];
                sigma[best.0] += k[i];
                memb.set(i, best.0);
                total_gain += best.1;
            }
        }
        iterations += 1;
        if total_gain == 0.0 {
            return (memb, iterations);
        }
    }
}

/// Aggregation rebuilt from scratch with ordered maps; the super-vertex
/// self-loop carries each community's internal undirected weight plus its
/// members' self-loops.
fn map_aggregate(g: &CsrGraph, memb: &Membership, communities: usize) -> CsrGraph {
    let mut doubled_internal = vec![0.0f64; communities];
    let mut self_loops = vec![0.0f64; communities];
    let mut has_internal = vec![false; communities];
    let mut inter: BTreeMap<(usize, usize), f64> = BTreeMap::new();

    for i in 0..g.order() {
        let ci = memb[i];
        let (targets, weights) = g.adjacency(i);
        for (&j, &w) in targets.iter().zip(weights) {
            let cj = memb[j];
            if j == i {
                self_loops[ci] += w;
                has_internal[ci] = true;
            } else if ci == cj {
                doubled_internal[ci] += w;
                has_internal[ci] = true;
            } else if ci < cj {
                *inter.entry((ci, cj)).or_insert(0.0) += w;
            }
        }
    }

    let mut list = EdgeList::new(communities);
    for c in 0..communities {
        if has_internal[c] {
            list.push(c, c, doubled_internal[c] / 2.0 + self_loops[c]);
        }
    }
    for (&(c, d), &w) in &inter {
        list.push(c, d, w);
    }
    build_csr(&list)
}
