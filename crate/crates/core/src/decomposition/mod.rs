//! Sparse/dense vertex decomposition: the exact extended decomposition, its
//! verifier, and the sampled variant used by the stream, query and MPC runners.

mod sampled;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{sorted_intersection_count, DisjointSets, Edge, Graph, Vertex};
use crate::SCHEMA_VERSION;

pub use sampled::{
    bernoulli_decomposition_from_graph, components_to_decomposition, cut_sampling_rate,
    cut_stream_budget, dense_stream_budget, BernoulliPlan,
    dense_sampling_rate, detect_dense, friend_sampling_rate, select_friend_set, DenseRule,
    FriendOracle, SamplingConstants, StreamEdgeCollector, StreamFriendCollector,
};

const SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CliqueStats {
    pub size: usize,
    /// Average number of non-neighbors inside the clique.
    pub avg_complement_degree: f64,
    pub max_outside_neighbors: usize,
    /// `|C \ N(v)|`, counting `v` itself.
    pub max_inside_non_neighbors: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HssDecomposition {
    pub eps: f64,
    pub sparse: Vec<Vertex>,
    pub cliques: Vec<Vec<Vertex>>,
}

impl HssDecomposition {
    /// Sorts every part and orders cliques by their smallest vertex.
    pub fn new(eps: f64, mut sparse: Vec<Vertex>, mut cliques: Vec<Vec<Vertex>>) -> Self {
        sparse.sort_unstable();
        for c in &mut cliques {
            c.sort_unstable();
        }
        cliques.sort_unstable_by_key(|c| c.first().copied());
        HssDecomposition {
            eps,
            sparse,
            cliques,
        }
    }

    pub fn all_sparse(eps: f64, n: usize) -> Self {
        HssDecomposition::new(eps, (0..n as Vertex).collect(), Vec::new())
    }

    pub fn stats(&self, graph: &Graph) -> Vec<CliqueStats> {
        self.cliques.iter().map(|c| clique_stats(graph, c)).collect()
    }

    pub fn dump(&self, graph: &Graph) -> DecompositionDump {
        DecompositionDump {
            schema_version: SCHEMA_VERSION,
            eps: self.eps,
            sparse: self.sparse.clone(),
            cliques: self.cliques.clone(),
            stats: self.stats(graph),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionDump {
    pub schema_version: u32,
    pub eps: f64,
    pub sparse: Vec<Vertex>,
    pub cliques: Vec<Vec<Vertex>>,
    #[serde(default)]
    pub stats: Vec<CliqueStats>,
}

impl From<DecompositionDump> for HssDecomposition {
    fn from(d: DecompositionDump) -> Self {
        HssDecomposition::new(d.eps, d.sparse, d.cliques)
    }
}

fn clique_stats(graph: &Graph, clique: &[Vertex]) -> CliqueStats {
    let size = clique.len();
    let mut total_non = 0usize;
    let mut max_out = 0;
    let mut max_in = 0;
    for &v in clique {
        let inside = sorted_intersection_count(graph.neighbors(v), clique);
        max_out = max_out.max(graph.degree(v) - inside);
        max_in = max_in.max(size - inside);
        total_non += size - 1 - inside;
    }
    CliqueStats {
        size,
        avg_complement_degree: if size == 0 {
            0.0
        } else {
            total_non as f64 / size as f64
        },
        max_outside_neighbors: max_out,
        max_inside_non_neighbors: max_in,
    }
}

/// Common-neighbor count of every edge, in `graph.edges()` order.
pub fn edge_common_counts(graph: &Graph) -> Vec<(Edge, usize)> {
    let mut stamp = vec![u32::MAX; graph.n()];
    let mut out = Vec::with_capacity(graph.m());
    for v in graph.vertices() {
        for &u in graph.neighbors(v) {
            stamp[u as usize] = v;
        }
        for &u in graph.neighbors(v).iter().filter(|&&u| u > v) {
            let c = graph
                .neighbors(u)
                .iter()
                .filter(|&&w| stamp[w as usize] == v)
                .count();
            out.push((Edge::new(v, u), c));
        }
    }
    out
}

#[inline]
fn at_least(x: usize, bound: f64) -> bool {
    x as f64 >= bound - SLACK
}

/// Edges whose endpoints share at least `(1−ε)Δ` neighbors.
pub fn exact_friend_edges(graph: &Graph, eps: f64) -> Vec<Edge> {
    let bound = (1.0 - eps) * graph.max_degree() as f64;
    graph
        .edges()
        .filter(|e| at_least(graph.common_neighbors(e.lo(), e.hi()), bound))
        .collect()
}

/// Vertices with at least `(1−ε)Δ` incident friend edges. With `Δ = 0`
/// every vertex qualifies vacuously.
pub fn exact_dense_vertices(graph: &Graph, eps: f64, friends: &[Edge]) -> Vec<Vertex> {
    let bound = (1.0 - eps) * graph.max_degree() as f64;
    let mut fdeg = vec![0usize; graph.n()];
    for e in friends {
        fdeg[e.lo() as usize] += 1;
        fdeg[e.hi() as usize] += 1;
    }
    (0..graph.n() as Vertex)
        .filter(|&v| at_least(fdeg[v as usize], bound))
        .collect()
}

pub fn exact_extended_decomposition(graph: &Graph, eps: f64) -> Result<HssDecomposition> {
    if !(eps > 0.0 && eps <= 1.0 / 6.0 + SLACK) {
        return Err(invalid(format!("eps {eps} outside (0, 1/6]")));
    }
    let n = graph.n();
    let delta = graph.max_degree();
    if delta <= 1 {
        return Ok(HssDecomposition::all_sparse(eps, n));
    }
    let counts = edge_common_counts(graph);
    let bound = |x: f64| (1.0 - x) * delta as f64;
    let friends = |x: f64| -> Vec<Edge> {
        counts
            .iter()
            .filter(|(_, c)| at_least(*c, bound(x)))
            .map(|(e, _)| *e)
            .collect()
    };
    let f1 = friends(eps);
    let f2 = friends(2.0 * eps);
    let mut dense2 = vec![false; n];
    for v in exact_dense_vertices(graph, 2.0 * eps, &f2) {
        dense2[v as usize] = true;
    }
    let mut dense1 = vec![false; n];
    for v in exact_dense_vertices(graph, eps, &f1) {
        dense1[v as usize] = true;
    }
    let mut sets = DisjointSets::new(n);
    for e in &f2 {
        if dense2[e.lo() as usize] && dense2[e.hi() as usize] {
            sets.union(e.lo(), e.hi());
        }
    }
    let mut keep = vec![false; n];
    for v in 0..n as Vertex {
        if dense1[v as usize] {
            keep[sets.find(v) as usize] = true;
        }
    }
    let decomp = components_from_sets(eps, n, &mut sets, |v, root| dense2[v as usize] && keep[root as usize]);
    let report = verify_decomposition(graph, &decomp, DecompositionBounds::exact(eps));
    if let Some(v) = report.violations.first() {
        return Err(Error::PropertyViolation(format!("{v:?}")));
    }
    Ok(decomp)
}

pub(crate) fn components_from_sets(
    eps: f64,
    n: usize,
    sets: &mut DisjointSets,
    mut in_clique: impl FnMut(Vertex, u32) -> bool,
) -> HssDecomposition {
    let mut sparse = Vec::new();
    let mut by_root: std::collections::BTreeMap<u32, Vec<Vertex>> = Default::default();
    for v in 0..n as Vertex {
        let root = sets.find(v);
        if in_clique(v, root) {
            by_root.entry(root).or_default().push(v);
        } else {
            sparse.push(v);
        }
    }
    HssDecomposition::new(eps, sparse, by_root.into_values().collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundsKind {
    /// Sparse vertices must lie between the `2x`-sparse and `x`-sparse sets.
    Exact,
    /// Sparse vertices must be `x/4`-sparse.
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionBounds {
    pub x: f64,
    pub kind: BoundsKind,
}

impl DecompositionBounds {
    pub fn exact(eps: f64) -> Self {
        DecompositionBounds {
            x: eps,
            kind: BoundsKind::Exact,
        }
    }

    pub fn sampled(delta: f64) -> Self {
        DecompositionBounds {
            x: delta,
            kind: BoundsKind::Sampled,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NotPartition { vertex: Vertex, occurrences: usize },
    CliqueSize { clique: usize, size: usize },
    OutsideNeighbors { clique: usize, vertex: Vertex, count: usize },
    InsideNonNeighbors { clique: usize, vertex: Vertex, count: usize },
    DenseInSparse { vertex: Vertex },
    SparseOutsideSparseSet { vertex: Vertex },
    SpanningEdges { vertex: Vertex, edges: usize, bound: f64 },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub violations: Vec<Violation>,
}

impl DecompositionReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Most edges the neighborhood of an `eps`-sparse vertex can span:
/// more than `eps·Δ` of its (padded) neighbors are not friends, and each
/// misses at least `⌊eps·Δ⌋` others, so `C(Δ,2) − ⌊eps·Δ⌋(⌊eps·Δ⌋+1)/2`.
pub fn sparse_span_bound(delta: usize, eps: f64) -> f64 {
    let d = delta as f64;
    let a = (eps * d + SLACK).floor();
    d * (d - 1.0) / 2.0 - a * (a + 1.0) / 2.0
}

/// Edges spanned by `N(v)`.
pub fn spanning_edges(graph: &Graph, v: Vertex) -> usize {
    let nv = graph.neighbors(v);
    nv.iter()
        .map(|&u| sorted_intersection_count(graph.neighbors(u), nv))
        .sum::<usize>()
        / 2
}

fn dense_flags(graph: &Graph, eps: f64, counts: &[(Edge, usize)]) -> Vec<bool> {
    let bound = (1.0 - eps) * graph.max_degree() as f64;
    let mut fdeg = vec![0usize; graph.n()];
    for &(e, c) in counts {
        if at_least(c, bound) {
            fdeg[e.lo() as usize] += 1;
            fdeg[e.hi() as usize] += 1;
        }
    }
    fdeg.into_iter().map(|d| at_least(d, bound)).collect()
}

pub fn verify_decomposition(
    graph: &Graph,
    decomp: &HssDecomposition,
    bounds: DecompositionBounds,
) -> DecompositionReport {
    let n = graph.n();
    let delta = graph.max_degree() as f64;
    let x = bounds.x;
    let mut violations = Vec::new();

    let mut seen = vec![0usize; n];
    for &v in decomp.sparse.iter().chain(decomp.cliques.iter().flatten()) {
        if let Some(s) = seen.get_mut(v as usize) {
            *s += 1;
        }
    }
    for (v, &c) in seen.iter().enumerate() {
        if c != 1 {
            violations.push(Violation::NotPartition {
                vertex: v as Vertex,
                occurrences: c,
            });
        }
    }

    for (i, clique) in decomp.cliques.iter().enumerate() {
        let size = clique.len();
        if (size as f64) < (1.0 - x) * delta - SLACK || size as f64 > (1.0 + 6.0 * x) * delta + SLACK
        {
            violations.push(Violation::CliqueSize { clique: i, size });
        }
        let mut sorted = clique.clone();
        sorted.sort_unstable();
        for &v in &sorted {
            let inside = sorted_intersection_count(graph.neighbors(v), &sorted);
            let outside = graph.degree(v) - inside;
            if outside as f64 > 7.0 * x * delta + SLACK {
                violations.push(Violation::OutsideNeighbors {
                    clique: i,
                    vertex: v,
                    count: outside,
                });
            }
            let non = size - inside;
            if non as f64 > 6.0 * x * delta + SLACK {
                violations.push(Violation::InsideNonNeighbors {
                    clique: i,
                    vertex: v,
                    count: non,
                });
            }
        }
    }

    let sparse_eps = match bounds.kind {
        BoundsKind::Exact => x,
        BoundsKind::Sampled => x / 4.0,
    };
    if graph.max_degree() >= 2 {
        let counts = edge_common_counts(graph);
        let mut span2 = vec![0usize; n];
        for &(e, c) in &counts {
            span2[e.lo() as usize] += c;
            span2[e.hi() as usize] += c;
        }
        let dense = dense_flags(graph, sparse_eps, &counts);
        let span_bound = sparse_span_bound(graph.max_degree(), sparse_eps);
        for &v in &decomp.sparse {
            if dense.get(v as usize).copied().unwrap_or(false) {
                violations.push(Violation::DenseInSparse { vertex: v });
            }
            let edges = span2[v as usize] / 2;
            if edges as f64 > span_bound + SLACK {
                violations.push(Violation::SpanningEdges {
                    vertex: v,
                    edges,
                    bound: span_bound,
                });
            }
        }
        if bounds.kind == BoundsKind::Exact {
            let dense2 = dense_flags(graph, 2.0 * x, &counts);
            for clique in &decomp.cliques {
                for &v in clique {
                    if !dense2[v as usize] {
                        violations.push(Violation::SparseOutsideSparseSet { vertex: v });
                    }
                }
            }
        }
    }
    DecompositionReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GeneratorSpec, GraphModel};

    fn cliques(size: usize, count: usize) -> Graph {
        generate(&GeneratorSpec::new(
            GraphModel::CliqueCollection {
                clique_size: size,
                count,
            },
            0,
        ))
        .unwrap()
    }

    #[test]
    fn k4_all_edges_are_friends() {
        let k4 = Graph::complete(4);
        assert_eq!(exact_friend_edges(&k4, 1.0 / 3.0).len(), 6);
    }

    #[test]
    fn path_has_no_strict_friends() {
        let p = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(exact_friend_edges(&p, 0.0).is_empty());
    }

    #[test]
    fn friend_threshold_boundary() {
        // K_{Δ+1}: common = Δ−1, friend iff εΔ ≥ 1
        let k = Graph::complete(11);
        assert_eq!(exact_friend_edges(&k, 0.1).len(), 55);
        assert!(exact_friend_edges(&k, 0.099).is_empty());
        let f = exact_friend_edges(&k, 0.1);
        assert_eq!(exact_dense_vertices(&k, 0.1, &f).len(), 11);
    }

    #[test]
    fn degenerate_dense_cases() {
        let empty = Graph::empty(4);
        assert_eq!(exact_dense_vertices(&empty, 0.1, &[]).len(), 4);
        let d = exact_extended_decomposition(&empty, 0.1).unwrap();
        assert_eq!(d.sparse.len(), 4);
        let star = Graph::from_edges(6, (1..6).map(|v| (0, v))).unwrap();
        let f = exact_friend_edges(&star, 0.1);
        assert!(exact_dense_vertices(&star, 0.1, &f).is_empty());
    }

    #[test]
    fn disjoint_cliques_decompose_exactly() {
        let g = cliques(25, 4);
        let d = exact_extended_decomposition(&g, 0.1).unwrap();
        assert!(d.sparse.is_empty());
        assert_eq!(d.cliques.len(), 4);
        assert_eq!(d.cliques[1], (25..50).collect::<Vec<_>>());
        let stats = d.stats(&g);
        assert_eq!(stats[0].max_inside_non_neighbors, 1);
        assert_eq!(stats[0].avg_complement_degree, 0.0);
    }

    #[test]
    fn sparse_random_graph_has_no_cliques() {
        let g = generate(&GeneratorSpec::new(
            GraphModel::GnpCapped {
                n: 400,
                p: 0.05,
                max_degree: 40,
            },
            3,
        ))
        .unwrap();
        let d = exact_extended_decomposition(&g, 0.1).unwrap();
        assert!(d.cliques.is_empty());
        assert_eq!(d.sparse.len(), 400);
    }

    #[test]
    fn rejects_eps_out_of_range() {
        assert!(exact_extended_decomposition(&Graph::complete(3), 0.0).is_err());
        assert!(exact_extended_decomposition(&Graph::complete(3), 0.3).is_err());
    }

    #[test]
    fn verifier_flags_oversized_clique() {
        let g = cliques(21, 2);
        // merging both cliques gives size 42 > (1+6·0.1)·20
        let d = HssDecomposition::new(0.1, vec![], vec![(0..42).collect()]);
        let r = verify_decomposition(&g, &d, DecompositionBounds::exact(0.1));
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::CliqueSize { size: 42, .. })));
    }

    #[test]
    fn verifier_flags_mislabelled_sparse_vertex() {
        let g = cliques(21, 1);
        let d = HssDecomposition::new(0.1, vec![0], vec![(1..21).collect()]);
        let r = verify_decomposition(&g, &d, DecompositionBounds::exact(0.1));
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::SpanningEdges { vertex: 0, .. })));
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::DenseInSparse { vertex: 0 })));
    }

    #[test]
    fn small_cliques_stay_sparse() {
        // Δ·eps < 1: no edge of K5 is a friend, and N(v) spanning all
        // C(4,2) edges is consistent with being sparse
        assert_eq!(sparse_span_bound(4, 1.0 / 6.0), 6.0);
        assert_eq!(sparse_span_bound(20, 0.1), 187.0);
        let g = cliques(5, 3);
        let d = exact_extended_decomposition(&g, 1.0 / 6.0).unwrap();
        assert_eq!(d.sparse.len(), 15);
    }

    #[test]
    fn verifier_flags_missing_vertex() {
        let g = cliques(3, 1);
        let d = HssDecomposition::new(0.1, vec![0, 1], vec![]);
        let r = verify_decomposition(&g, &d, DecompositionBounds::exact(0.1));
        assert!(r
            .violations
            .contains(&Violation::NotPartition { vertex: 2, occurrences: 0 }));
    }

    #[test]
    fn dump_round_trip() {
        let g = cliques(25, 2);
        let d = exact_extended_decomposition(&g, 0.1).unwrap();
        let text = serde_json::to_string(&d.dump(&g)).unwrap();
        let back: DecompositionDump = serde_json::from_str(&text).unwrap();
        assert_eq!(HssDecomposition::from(back), d);
    }
}
