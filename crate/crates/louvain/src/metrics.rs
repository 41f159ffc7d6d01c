//! Modularity and delta-modularity over a partition of a [`CsrGraph`].
//!
//! Both forms of the modularity score are provided: the community-sum form
//! used by the solver and the pairwise form used as an independent test
//! oracle. [`delta_modularity`] is the O(1) score change for moving one
//! vertex between communities; its argument conventions are spelled out
//! below and are verified against `Q_after - Q_before` by the test suite.

use thiserror::Error;

use crate::graph::CsrGraph;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    /// The graph has no edge weight, so the `1/2m` terms are undefined.
    #[error("modularity is undefined on a graph with zero total weight")]
    UndefinedModularity,
    /// Membership length does not match the graph's vertex count.
    #[error("membership covers {membership} vertices but the graph has {graph}")]
    MembershipMismatch { membership: usize, graph: usize },
}

/// Dense vertex-to-community mapping.
///
/// Community ids are plain indices; they are only guaranteed to form the
/// contiguous range `[0, count)` after [`renumber`](crate::algo::renumber).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Membership {
    assignment: Vec<usize>,
}

impl Membership {
    /// Each vertex in its own community: `assignment[i] = i`.
    pub fn identity(n: usize) -> Self {
        Membership {
            assignment: (0..n).collect(),
        }
    }

    pub fn from_vec(assignment: Vec<usize>) -> Self {
        Membership { assignment }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn get(&self, vertex: usize) -> usize {
        self.assignment[vertex]
    }

    pub fn set(&mut self, vertex: usize, community: usize) {
        self.assignment[vertex] = community;
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.assignment
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.assignment.iter().copied()
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.assignment
    }

    /// Largest community id in use, or `None` for an empty membership.
    pub fn max_id(&self) -> Option<usize> {
        self.assignment.iter().copied().max()
    }
}

impl std::ops::Index<usize> for Membership {
    type Output = usize;

    fn index(&self, vertex: usize) -> &usize {
        &self.assignment[vertex]
    }
}

impl From<Vec<usize>> for Membership {
    fn from(assignment: Vec<usize>) -> Self {
        Membership { assignment }
    }
}

/// Per-community weight totals.
///
/// `sigma[c]` sums weights over ordered intra-community pairs: each
/// undirected internal edge counts twice and a member's self-loop weight
/// counts twice. `big_sigma[c]` sums the weighted degrees of the members,
/// so `sum(big_sigma) == 2m`. Both vectors are indexed by community id and
/// sized to the largest id in use plus one.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunityWeights {
    pub sigma: Vec<f64>,
    pub big_sigma: Vec<f64>,
}

fn check(g: &CsrGraph, memb: &Membership) -> Result<(), MetricsError> {
    if memb.len() != g.order() {
        return Err(MetricsError::MembershipMismatch {
            membership: memb.len(),
            graph: g.order(),
        });
    }
    Ok(())
}

/// Per-community `sigma` and `Sigma` totals for a partition.
pub fn community_weights(
    g: &CsrGraph,
    memb: &Membership,
) -> Result<CommunityWeights, MetricsError> {
    check(g, memb)?;
    let communities = memb.max_id().map_or(0, |m| m + 1);
    let mut sigma = vec![0.0; communities];
    let mut big_sigma = vec![0.0; communities];
    for i in 0..g.order() {
        let c = memb[i];
        big_sigma[c] += g.weighted_degree(i);
        let (targets, weights) = g.adjacency(i);
        for (&j, &w) in targets.iter().zip(weights) {
            if memb[j] == c {
                sigma[c] += if j == i { 2.0 * w } else { w };
            }
        }
    }
    Ok(CommunityWeights { sigma, big_sigma })
}

/// Modularity `Q` of a partition, community-sum form:
/// `Q = sum_c [sigma_c/2m - (Sigma_c/2m)^2]`.
pub fn modularity(g: &CsrGraph, memb: &Membership) -> Result<f64, MetricsError> {
    let m = g.total_weight();
    if m == 0.0 {
        return Err(MetricsError::UndefinedModularity);
    }
    let cw = community_weights(g, memb)?;
    let m2 = 2.0 * m;
    let mut q = 0.0;
    for (sigma, big_sigma) in cw.sigma.iter().zip(&cw.big_sigma) {
        let frac = big_sigma / m2;
        q += sigma / m2 - frac * frac;
    }
    Ok(q)
}

/// Modularity via the pairwise sum, used only as an oracle.
///
/// Runs over every ordered same-community vertex pair `(i, j)`, adding
/// `a_ij - K_i K_j / 2m` where `a_ij` is the stored weight (a self-loop
/// counting twice) or zero for non-adjacent pairs. Quadratic in the vertex
/// count; agrees with [`modularity`] to floating-point error.
pub fn modularity_edge_form(g: &CsrGraph, memb: &Membership) -> Result<f64, MetricsError> {
    let m = g.total_weight();
    if m == 0.0 {
        return Err(MetricsError::UndefinedModularity);
    }
    check(g, memb)?;
    let n = g.order();
    let degrees: Vec<f64> = (0..n).map(|i| g.weighted_degree(i)).collect();
    let m2 = 2.0 * m;
    let mut q = 0.0;
    for i in 0..n {
        let (targets, weights) = g.adjacency(i);
        for j in 0..n {
            if memb[j] != memb[i] {
                continue;
            }
            let a = match targets.binary_search(&j) {
                Ok(pos) if j == i => 2.0 * weights[pos],
                Ok(pos) => weights[pos],
                Err(_) => 0.0,
            };
            q += a - degrees[i] * degrees[j] / m2;
        }
    }
    Ok(q / m2)
}

/// Delta-modularity of moving vertex `i` from community `d` to `c`.
///
/// Argument conventions: `k_to_c` and `k_to_d` are `i`'s edge weights into
/// the target and current communities, excluding any self-loop of `i`;
/// `sigma_c` is the target community's total with `i` not a member (which
/// it is not); `sigma_d_excl` is the current community's total **with
/// `K_i` already removed**. Under these conventions the exact change is
///
/// ```text
/// dQ = (k_to_c - k_to_d)/m - K_i (sigma_c - sigma_d_excl) / 2m^2
/// ```
///
/// which equals `Q_after - Q_before` of the community-sum form, and is
/// identically zero when the paired arguments are equal (a move to the
/// vertex's own community).
pub fn delta_modularity(
    total_weight: f64,
    k_i: f64,
    k_to_c: f64,
    k_to_d: f64,
    sigma_c: f64,
    sigma_d_excl: f64,
) -> Result<f64, MetricsError> {
    if total_weight == 0.0 {
        return Err(MetricsError::UndefinedModularity);
    }
    Ok(delta_modularity_unchecked(
        total_weight,
        k_i,
        k_to_c,
        k_to_d,
        sigma_c,
        sigma_d_excl,
    ))
}

#[inline]
pub(crate) fn delta_modularity_unchecked(
    m: f64,
    k_i: f64,
    k_to_c: f64,
    k_to_d: f64,
    sigma_c: f64,
    sigma_d_excl: f64,
) -> f64 {
    (k_to_c - k_to_d) / m - k_i * (sigma_c - sigma_d_excl) / (2.0 * m * m)
}

/// Delta-modularity of moving `vertex` to community `target`, with all the
/// argument conventions of [`delta_modularity`] derived from the graph and
/// the given [`CommunityWeights`].
pub fn move_gain(
    g: &CsrGraph,
    memb: &Membership,
    weights: &CommunityWeights,
    vertex: usize,
    target: usize,
) -> Result<f64, MetricsError> {
    check(g, memb)?;
    let d = memb[vertex];
    if target == d {
        return Ok(0.0);
    }
    let k_i = g.weighted_degree(vertex);
    let (targets, ws) = g.adjacency(vertex);
    let mut k_to_c = 0.0;
    let mut k_to_d = 0.0;
    for (&j, &w) in targets.iter().zip(ws) {
        if j == vertex {
            continue;
        }
        if memb[j] == target {
            k_to_c += w;
        } else if memb[j] == d {
            k_to_d += w;
        }
    }
    let sigma_c = weights.big_sigma.get(target).copied().unwrap_or(0.0);
    let sigma_d_excl = weights.big_sigma[d] - k_i;
    delta_modularity(g.total_weight(), k_i, k_to_c, k_to_d, sigma_c, sigma_d_excl)
}

/// Number of distinct community ids in use.
pub fn count_communities(memb: &Membership) -> usize {
    let Some(max) = memb.max_id() else {
        return 0;
    };
    let mut seen = vec![false; max + 1];
    let mut count = 0;
    for c in memb.iter() {
        if !seen[c] {
            seen[c] = true;
            count += 1;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_csr, EdgeList};

    fn triangle() -> CsrGraph {
        build_csr(&EdgeList::from_entries(
            3,
            [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)],
        ))
    }

    /// Two triangles {0,1,2} and {3,4,5} joined by the edge 2-3; m = 7.
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

    fn barbell_split() -> Membership {
        Membership::from_vec(vec![0, 0, 0, 1, 1, 1])
    }

    #[test]
    fn modularity_triangle_single_community() {
        let g = triangle();
        let q = modularity(&g, &Membership::from_vec(vec![0, 0, 0])).unwrap();
        assert!(q.abs() < 1e-15);
    }

    #[test]
    fn modularity_triangle_singletons() {
        let g = triangle();
        let q = modularity(&g, &Membership::identity(3)).unwrap();
        assert!((q - (-1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn modularity_barbell() {
        let g = barbell();
        let q = modularity(&g, &barbell_split()).unwrap();
        assert!((q - 5.0 / 14.0).abs() < 1e-12, "q = {q}");
        let q_edge = modularity_edge_form(&g, &barbell_split()).unwrap();
        assert!((q_edge - 5.0 / 14.0).abs() < 1e-12, "q_edge = {q_edge}");
    }

    #[test]
    fn modularity_zero_weight_is_an_error() {
        let g = build_csr(&EdgeList::new(2));
        assert_eq!(
            modularity(&g, &Membership::identity(2)),
            Err(MetricsError::UndefinedModularity)
        );
    }

    #[test]
    fn edge_form_matches_on_self_loop() {
        let g = build_csr(&EdgeList::from_entries(1, [(0, 0, 4.0)]));
        let memb = Membership::from_vec(vec![0]);
        assert!(modularity(&g, &memb).unwrap().abs() < 1e-15);
        assert!(modularity_edge_form(&g, &memb).unwrap().abs() < 1e-15);
    }

    #[test]
    fn community_weights_examples() {
        let g = triangle();
        let cw = community_weights(&g, &Membership::from_vec(vec![0, 0, 0])).unwrap();
        assert_eq!(cw.sigma, vec![6.0]);
        assert_eq!(cw.big_sigma, vec![6.0]);

        let g = barbell();
        let cw = community_weights(&g, &barbell_split()).unwrap();
        assert_eq!(cw.sigma, vec![6.0, 6.0]);
        assert_eq!(cw.big_sigma, vec![7.0, 7.0]);

        let cw = community_weights(&g, &Membership::identity(6)).unwrap();
        assert!(cw.sigma.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn count_communities_examples() {
        assert_eq!(
            count_communities(&Membership::from_vec(vec![1, 1, 0, 2, 0])),
            3
        );
        assert_eq!(count_communities(&Membership::from_vec(vec![0; 5])), 1);
        assert_eq!(count_communities(&Membership::from_vec(vec![])), 0);
    }

    /// Moving a vertex to its own community is exactly no change.
    #[test]
    fn delta_modularity_same_community_is_zero() {
        let dq = delta_modularity(7.0, 3.0, 2.0, 2.0, 4.0, 4.0).unwrap();
        assert_eq!(dq, 0.0);
    }

    /// Barbell: move vertex 2 from {0,1,2} into {3,4,5}. The exact change,
    /// checked against a full recomputation below, is -23/98.
    #[test]
    fn delta_modularity_barbell_move() {
        let g = barbell();
        let memb = barbell_split();
        let cw = community_weights(&g, &memb).unwrap();
        let dq = move_gain(&g, &memb, &cw, 2, 1).unwrap();
        assert!((dq - (-23.0 / 98.0)).abs() < 1e-12, "dq = {dq}");

        // Independent route: evaluate Q before and after the move.
        let before = modularity(&g, &memb).unwrap();
        let mut moved = memb.clone();
        moved.set(2, 1);
        let after = modularity(&g, &moved).unwrap();
        assert!((dq - (after - before)).abs() < 1e-12);
    }

    #[test]
    fn delta_modularity_isolated_vertex() {
        let dq = delta_modularity(7.0, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(dq, 0.0);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        prop_compose! {
            fn arb_graph_and_membership()(n in 2usize..20)(
                n in Just(n),
                entries in proptest::collection::vec(
                    (0..n, 0..n, (0u32..8).prop_map(|q| q as f64 / 4.0 + 0.25)),
                    1..48,
                ),
                assignment in proptest::collection::vec(0..n, n),
            ) -> (CsrGraph, Membership) {
                (
                    build_csr(&EdgeList::from_entries(n, entries)),
                    Membership::from_vec(assignment),
                )
            }
        }

        proptest! {
            #[test]
            fn two_forms_agree((g, memb) in arb_graph_and_membership()) {
                let q1 = modularity(&g, &memb).unwrap();
                let q2 = modularity_edge_form(&g, &memb).unwrap();
                prop_assert!((q1 - q2).abs() <= 1e-10, "{q1} vs {q2}");
                prop_assert!((-0.5 - 1e-12..=1.0 + 1e-12).contains(&q1));
            }

            #[test]
            fn move_gain_matches_recomputation((g, memb) in arb_graph_and_membership()) {
                let cw = community_weights(&g, &memb).unwrap();
                let m2 = 2.0 * g.total_weight();
                let total: f64 = cw.big_sigma.iter().sum();
                prop_assert!((total - m2).abs() <= 1e-12 * m2.max(1.0));

                for vertex in 0..g.order() {
                    let target = (vertex * 7 + 1) % (memb.max_id().unwrap() + 1);
                    let dq = move_gain(&g, &memb, &cw, vertex, target).unwrap();
                    let before = modularity(&g, &memb).unwrap();
                    let mut moved = memb.clone();
                    moved.set(vertex, target);
                    let after = modularity(&g, &moved).unwrap();
                    prop_assert!((dq - (after - before)).abs() <= 1e-10,
                        "vertex {vertex} -> {target}: {dq} vs {}", after - before);
                }
            }
        }
    }
}
