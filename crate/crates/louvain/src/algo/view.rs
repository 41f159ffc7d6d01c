//! Adjacency access shared by the pass engines.
//!
//! The first pass reads the caller's [`CsrGraph`] directly; later passes
//! read the holey CSR produced by aggregation. Both expose the same
//! minimal view, so the engines are written once.

use crate::graph::CsrGraph;

pub(crate) trait Adjacency: Sync {
    fn order(&self) -> usize;
    fn degree(&self, v: usize) -> usize;
    fn adjacency(&self, v: usize) -> (&[usize], &[f64]);
    fn total_weight(&self) -> f64;

    /// Weighted degree with a self-loop counted twice.
    fn weighted_degree(&self, v: usize) -> f64 {
        let (targets, weights) = self.adjacency(v);
        let mut k = 0.0;
        for (&j, &w) in targets.iter().zip(weights) {
            k += if j == v { 2.0 * w } else { w };
        }
        k
    }
}

impl Adjacency for CsrGraph {
    fn order(&self) -> usize {
        CsrGraph::order(self)
    }

    fn degree(&self, v: usize) -> usize {
        CsrGraph::degree(self, v)
    }

    fn adjacency(&self, v: usize) -> (&[usize], &[f64]) {
        CsrGraph::adjacency(self, v)
    }

    fn total_weight(&self) -> f64 {
        CsrGraph::total_weight(self)
    }
}

/// Super-vertex graph in holey CSR form.
///
/// Per-vertex slices are placed at offsets computed from an over-estimate
/// of each super-vertex's degree (the summed degrees of its members), so
/// unused slots remain between slices. A slice is `begin[v]..begin[v] +
/// len[v]`; the gaps are never compacted. All buffers are preallocated at
/// the original graph's size and reused across passes.
pub(crate) struct HoleyCsr {
    pub order: usize,
    pub begin: Vec<usize>,
    pub len: Vec<usize>,
    pub edges: Vec<usize>,
    pub weights: Vec<f64>,
    pub total_weight: f64,
}

impl HoleyCsr {
    pub fn with_capacity(max_order: usize, max_entries: usize) -> Self {
        HoleyCsr {
            order: 0,
            begin: vec![0; max_order],
            len: vec![0; max_order],
            edges: vec![0; max_entries],
            weights: vec![0.0; max_entries],
            total_weight: 0.0,
        }
    }

    /// Repackages the populated prefix as a canonical [`CsrGraph`]
    /// (compacted, adjacency sorted by neighbor).
    pub fn to_csr(&self) -> CsrGraph {
        let n = self.order;
        let mut offsets = vec![0usize; n + 1];
        let mut edges = Vec::new();
        let mut weights = Vec::new();
        let mut pairs: Vec<(usize, f64)> = Vec::new();
        for v in 0..n {
            let (targets, ws) = Adjacency::adjacency(self, v);
            pairs.clear();
            pairs.extend(targets.iter().copied().zip(ws.iter().copied()));
            pairs.sort_unstable_by_key(|&(j, _)| j);
            for &(j, w) in &pairs {
                edges.push(j);
                weights.push(w);
            }
            offsets[v + 1] = edges.len();
        }
        CsrGraph::from_parts(n, offsets, edges, weights)
    }
}

impl Adjacency for HoleyCsr {
    fn order(&self) -> usize {
        self.order
    }

    fn degree(&self, v: usize) -> usize {
        self.len[v]
    }

    fn adjacency(&self, v: usize) -> (&[usize], &[f64]) {
        let lo = self.begin[v];
        let hi = lo + self.len[v];
        (&self.edges[lo..hi], &self.weights[lo..hi])
    }

    fn total_weight(&self) -> f64 {
        self.total_weight
    }
}

/// The graph a pass runs on: the original CSR on pass one, a holey CSR
/// afterwards.
pub(crate) enum PassGraph<'a> {
    Original(&'a CsrGraph),
    Work(&'a HoleyCsr),
}

impl Adjacency for PassGraph<'_> {
    fn order(&self) -> usize {
        match self {
            PassGraph::Original(g) => g.order(),
            PassGraph::Work(g) => g.order,
        }
    }

    fn degree(&self, v: usize) -> usize {
        match self {
            PassGraph::Original(g) => g.degree(v),
            PassGraph::Work(g) => g.len[v],
        }
    }

    fn adjacency(&self, v: usize) -> (&[usize], &[f64]) {
        match self {
            PassGraph::Original(g) => g.adjacency(v),
            PassGraph::Work(g) => Adjacency::adjacency(*g, v),
        }
    }

    fn total_weight(&self) -> f64 {
        match self {
            PassGraph::Original(g) => g.total_weight(),
            PassGraph::Work(g) => g.total_weight,
        }
    }
}
