//! Deterministic fixture graphs and seeded random generators.
//!
//! Everything here exists to feed tests, examples and benchmarks; it is
//! not a general-purpose graph generator suite. All randomness comes from
//! a self-contained SplitMix64 stream, so a given seed always produces the
//! same graph on every platform.

use crate::graph::{build_csr, CsrGraph, EdgeList};
use crate::metrics::Membership;

/// SplitMix64: tiny, fast, and good enough for fixture sampling.
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[0, n)`; `n` must be positive.
    pub fn next_below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

/// Geometric skip for Bernoulli(p) sampling over a run of candidates:
/// distance to the next success.
fn skip(rng: &mut SplitMix64, p: f64) -> usize {
    if p >= 1.0 {
        return 1;
    }
    let u = rng.next_f64().max(f64::MIN_POSITIVE);
    1 + (u.ln() / (1.0 - p).ln()) as usize
}

/// Erdos-Renyi G(n, p) with unit weights, sampled in O(n + edges).
pub fn gnp(n: usize, p: f64, seed: u64) -> CsrGraph {
    let mut rng = SplitMix64::new(seed);
    let mut list = EdgeList::new(n);
    if p > 0.0 {
        for u in 0..n {
            let mut v = u;
            loop {
                v += skip(&mut rng, p);
                if v >= n {
                    break;
                }
                list.push(u, v, 1.0);
            }
        }
    }
    build_csr(&list)
}

/// G(n, p) with dyadic random weights in `{0.25, 0.5, ..., 2.0}`.
///
/// Dyadic weights keep every weight sum exact in binary floating point,
/// which the determinism-sensitive tests rely on.
pub fn gnp_weighted(n: usize, p: f64, seed: u64) -> CsrGraph {
    let mut rng = SplitMix64::new(seed);
    let mut list = EdgeList::new(n);
    if p > 0.0 {
        for u in 0..n {
            let mut v = u;
            loop {
                v += skip(&mut rng, p);
                if v >= n {
                    break;
                }
                let w = (1 + rng.next_below(8)) as f64 / 4.0;
                list.push(u, v, w);
            }
        }
    }
    build_csr(&list)
}

/// Planted-partition graph: `blocks` groups of `per_block` consecutive
/// vertices, intra-block edges with probability `p_in` and cross-block
/// edges with probability `p_out`. Unit weights.
pub fn planted_partition(
    blocks: usize,
    per_block: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> CsrGraph {
    let n = blocks * per_block;
    let mut rng = SplitMix64::new(seed);
    let mut list = EdgeList::new(n);

    if p_in > 0.0 {
        for b in 0..blocks {
            let base = b * per_block;
            for u in base..base + per_block {
                let mut v = u;
                loop {
                    v += skip(&mut rng, p_in);
                    if v >= base + per_block {
                        break;
                    }
                    list.push(u, v, 1.0);
                }
            }
        }
    }
    if p_out > 0.0 {
        for a in 0..blocks {
            for b in (a + 1)..blocks {
                // Flat index over the per_block x per_block rectangle.
                let cells = per_block * per_block;
                let mut k = 0usize;
                loop {
                    let jump = skip(&mut rng, p_out);
                    if jump > cells - k {
                        break;
                    }
                    k += jump;
                    let cell = k - 1;
                    list.push(
                        a * per_block + cell / per_block,
                        b * per_block + cell % per_block,
                        1.0,
                    );
                }
            }
        }
    }
    build_csr(&list)
}

/// The expected community of each vertex in a [`planted_partition`] graph.
pub fn planted_membership(blocks: usize, per_block: usize) -> Membership {
    Membership::from_vec((0..blocks * per_block).map(|v| v / per_block).collect())
}

/// Random membership over at most `communities` ids.
pub fn random_membership(n: usize, communities: usize, seed: u64) -> Membership {
    let mut rng = SplitMix64::new(seed);
    Membership::from_vec((0..n).map(|_| rng.next_below(communities.max(1))).collect())
}

/// Connected G(n, p) sample: retries with successive sub-seeds until the
/// sample is connected (panics after 10_000 attempts, which at sane `p`
/// never happens).
pub fn connected_gnp(n: usize, p: f64, seed: u64) -> CsrGraph {
    for attempt in 0..10_000 {
        let g = gnp(n, p, seed.wrapping_add(attempt * 0x9E37_79B9));
        if is_connected(&g) {
            return g;
        }
    }
    panic!("no connected G({n}, {p}) sample after 10000 attempts");
}

/// Breadth-first connectivity check.
pub fn is_connected(g: &CsrGraph) -> bool {
    let n = g.order();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::from([0usize]);
    seen[0] = true;
    let mut visited = 1;
    while let Some(u) = queue.pop_front() {
        for &v in g.adjacency(u).0 {
            if !seen[v] {
                seen[v] = true;
                visited += 1;
                queue.push_back(v);
            }
        }
    }
    visited == n
}

/// Triangle on three vertices, unit weights.
pub fn triangle() -> CsrGraph {
    build_csr(&EdgeList::from_entries(
        3,
        [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)],
    ))
}

/// Two unit-weight triangles {0,1,2} and {3,4,5} joined by the edge 2-3.
/// Its modularity optimum is the two triangles, Q = 5/14.
pub fn barbell() -> CsrGraph {
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

/// Two disjoint k-cliques.
pub fn two_cliques(k: usize) -> CsrGraph {
    let mut list = EdgeList::new(2 * k);
    for base in [0, k] {
        for a in 0..k {
            for b in (a + 1)..k {
                list.push(base + a, base + b, 1.0);
            }
        }
    }
    build_csr(&list)
}

/// Path 0-1-...-(n-1).
pub fn path(n: usize) -> CsrGraph {
    build_csr(&EdgeList::from_entries(n, (1..n).map(|v| (v - 1, v, 1.0))))
}

/// Cycle on n vertices.
pub fn cycle(n: usize) -> CsrGraph {
    build_csr(&EdgeList::from_entries(
        n,
        (0..n).map(|v| (v, (v + 1) % n, 1.0)),
    ))
}

/// Star with the hub at vertex 0.
pub fn star(n: usize) -> CsrGraph {
    build_csr(&EdgeList::from_entries(n, (1..n).map(|v| (0, v, 1.0))))
}

/// Complete graph on n vertices.
pub fn complete(n: usize) -> CsrGraph {
    let mut list = EdgeList::new(n);
    for a in 0..n {
        for b in (a + 1)..n {
            list.push(a, b, 1.0);
        }
    }
    build_csr(&list)
}

/// w x h grid with 4-neighbor connectivity.
pub fn grid(w: usize, h: usize) -> CsrGraph {
    let mut list = EdgeList::new(w * h);
    for y in 0..h {
        for x in 0..w {
            let v = y * w + x;
            if x + 1 < w {
                list.push(v, v + 1, 1.0);
            }
            if y + 1 < h {
                list.push(v, v + w, 1.0);
            }
        }
    }
    build_csr(&list)
}
