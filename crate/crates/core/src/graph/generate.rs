use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Edge, Graph, Vertex};
use crate::error::{invalid, Error, Result};
use crate::hashing::{hash2, rng_from};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum GraphModel {
    /// G(n, p) with edges rejected once either endpoint reaches `max_degree`.
    GnpCapped { n: usize, p: f64, max_degree: usize },
    /// Configuration-model pairing; invalid pairs are dropped so degrees are at most `degree`.
    RegularLike { n: usize, degree: usize },
    CliqueCollection { clique_size: usize, count: usize },
    ColoringHard { n: usize },
    MatchingHard { n: usize },
    /// Disjoint union, parts relabelled in order.
    Union { parts: Vec<GraphModel> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub model: GraphModel,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(model: GraphModel, seed: u64) -> Self {
        GeneratorSpec { model, seed }
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<Graph> {
    build(&spec.model, spec.seed)
}

fn build(model: &GraphModel, seed: u64) -> Result<Graph> {
    match *model {
        GraphModel::GnpCapped { n, p, max_degree } => gnp_capped(n, p, max_degree, seed),
        GraphModel::RegularLike { n, degree } => regular_like(n, degree, seed),
        GraphModel::CliqueCollection { clique_size, count } => {
            clique_collection(clique_size, count)
        }
        GraphModel::ColoringHard { n } => coloring_hard(n, seed),
        GraphModel::MatchingHard { n } => matching_hard(n, seed),
        GraphModel::Union { ref parts } => {
            if parts.is_empty() {
                return Err(invalid("union needs at least one part"));
            }
            let mut acc = build(&parts[0], hash2(seed, 0))?;
            for (i, part) in parts.iter().enumerate().skip(1) {
                acc = acc.disjoint_union(&build(part, hash2(seed, i as u64))?);
            }
            Ok(acc)
        }
    }
}

fn check_n_delta(n: usize, delta: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if delta >= n {
        return Err(invalid(format!("degree bound {delta} must be below n = {n}")));
    }
    Ok(())
}

pub fn gnp_capped(n: usize, p: f64, max_degree: usize, seed: u64) -> Result<Graph> {
    check_n_delta(n, max_degree)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = rng_from(seed);
    let mut deg = vec![0usize; n];
    let mut edges = Vec::new();
    if p > 0.0 && max_degree > 0 {
        let total = n as u64 * (n as u64 - 1) / 2;
        let log_q = (1.0 - p).ln();
        // geometric skipping over the lexicographic pair order
        let mut idx: u64 = 0;
        let (mut u, mut row_start) = (0u64, 0u64);
        loop {
            if p < 1.0 {
                let r: f64 = rng.random::<f64>();
                let skip = ((1.0 - r).ln() / log_q).floor();
                if !skip.is_finite() || skip >= (total - idx) as f64 {
                    break;
                }
                idx += skip as u64;
            }
            if idx >= total {
                break;
            }
            while idx >= row_start + (n as u64 - 1 - u) {
                row_start += n as u64 - 1 - u;
                u += 1;
            }
            let v = u + 1 + (idx - row_start);
            let (a, b) = (u as usize, v as usize);
            if deg[a] < max_degree && deg[b] < max_degree {
                deg[a] += 1;
                deg[b] += 1;
                edges.push(Edge(a as Vertex, b as Vertex));
            }
            idx += 1;
        }
    }
    Ok(Graph::from_sorted_unique(n, &edges))
}

pub fn regular_like(n: usize, degree: usize, seed: u64) -> Result<Graph> {
    check_n_delta(n, degree)?;
    let mut rng = rng_from(seed);
    let mut stubs: Vec<Vertex> = (0..n as Vertex)
        .flat_map(|v| std::iter::repeat_n(v, degree))
        .collect();
    stubs.shuffle(&mut rng);
    let mut edges: Vec<Edge> = stubs
        .chunks_exact(2)
        .filter_map(|c| Edge::try_new(c[0], c[1]))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    Ok(Graph::from_sorted_unique(n, &edges))
}

pub fn clique_collection(clique_size: usize, count: usize) -> Result<Graph> {
    if clique_size == 0 || count == 0 {
        return Err(invalid("clique size and count must be positive"));
    }
    let mut edges = Vec::with_capacity(count * clique_size * (clique_size - 1) / 2);
    for c in 0..count {
        let base = (c * clique_size) as Vertex;
        for i in 0..clique_size as Vertex {
            for j in i + 1..clique_size as Vertex {
                edges.push(Edge(base + i, base + j));
            }
        }
    }
    Ok(Graph::from_sorted_unique(clique_size * count, &edges))
}

fn exact_sqrt(n: usize) -> Option<usize> {
    let s = (n as f64).sqrt().round() as usize;
    (s * s == n).then_some(s)
}

/// `2n` vertices: `V_0 = 0..n` cut into √n blocks, block `i` fully joined to
/// a private block at `n + i√n`, plus a uniform perfect matching on `V_0`.
pub fn coloring_hard(n: usize, seed: u64) -> Result<Graph> {
    let s = exact_sqrt(n).ok_or_else(|| invalid(format!("{n} is not a perfect square")))?;
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if n % 2 == 1 {
        return Err(Error::Infeasible(format!(
            "no perfect matching on an odd block of {n} vertices"
        )));
    }
    let mut edges = Vec::with_capacity(n * s + n / 2);
    for i in 0..s {
        for a in 0..s {
            for b in 0..s {
                edges.push(Edge::new((i * s + a) as Vertex, (n + i * s + b) as Vertex));
            }
        }
    }
    let mut order: Vec<Vertex> = (0..n as Vertex).collect();
    order.shuffle(&mut rng_from(seed));
    edges.extend(order.chunks_exact(2).map(|c| Edge::new(c[0], c[1])));
    edges.sort_unstable();
    Ok(Graph::from_sorted_unique(2 * n, &edges))
}

/// Bipartite `L = 0..n`, `R = n..2n`; the first `n/6` of each side form
/// `L1`/`R1`, joined to the whole opposite side; `L2`, `R2` get a uniform
/// perfect matching.
pub fn matching_hard(n: usize, seed: u64) -> Result<Graph> {
    if n == 0 || !n.is_multiple_of(6) {
        return Err(invalid(format!("{n} is not a positive multiple of 6")));
    }
    let t = n / 6;
    let mut edges = Vec::new();
    for l in 0..n {
        for r in 0..t {
            edges.push(Edge::new(l as Vertex, (n + r) as Vertex));
        }
    }
    for l in 0..t {
        for r in t..n {
            edges.push(Edge::new(l as Vertex, (n + r) as Vertex));
        }
    }
    let mut r2: Vec<Vertex> = (n + t..2 * n).map(|v| v as Vertex).collect();
    r2.shuffle(&mut rng_from(seed));
    for (i, &r) in r2.iter().enumerate() {
        edges.push(Edge::new((t + i) as Vertex, r));
    }
    edges.sort_unstable();
    Ok(Graph::from_sorted_unique(2 * n, &edges))
}

/// Uniform unordered pair of distinct vertices.
pub(crate) fn random_pair<R: Rng>(rng: &mut R, n: usize) -> Edge {
    loop {
        let a = rng.random_range(0..n as Vertex);
        let b = rng.random_range(0..n as Vertex);
        if let Some(e) = Edge::try_new(a, b) {
            return e;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(model: GraphModel, seed: u64) -> Graph {
        generate(&GeneratorSpec::new(model, seed)).unwrap()
    }

    #[test]
    fn zero_cap_gives_empty_graph() {
        let g = gen(
            GraphModel::GnpCapped {
                n: 4,
                p: 0.5,
                max_degree: 0,
            },
            1,
        );
        assert_eq!((g.n(), g.m()), (4, 0));
    }

    #[test]
    fn gnp_is_deterministic_and_capped() {
        let model = GraphModel::GnpCapped {
            n: 100,
            p: 0.5,
            max_degree: 99,
        };
        let a = gen(model.clone(), 7);
        let b = gen(model, 7);
        assert_eq!(a, b);
        assert!(a.m() > 2000 && a.m() < 2950);
        let c = gen(
            GraphModel::GnpCapped {
                n: 300,
                p: 0.2,
                max_degree: 30,
            },
            2,
        );
        assert!(c.max_degree() <= 30);
    }

    #[test]
    fn gnp_full_probability_is_complete() {
        let g = gen(
            GraphModel::GnpCapped {
                n: 9,
                p: 1.0,
                max_degree: 8,
            },
            0,
        );
        assert_eq!(g, Graph::complete(9));
    }

    #[test]
    fn clique_collection_shape() {
        let g = gen(
            GraphModel::CliqueCollection {
                clique_size: 5,
                count: 2,
            },
            0,
        );
        assert_eq!((g.n(), g.m(), g.max_degree()), (10, 20, 4));
        assert!(!g.has_edge(4, 5));
    }

    #[test]
    fn coloring_hard_small() {
        let g = coloring_hard(4, 0).unwrap();
        assert_eq!((g.n(), g.m(), g.max_degree()), (8, 10, 3));
        assert_eq!(g, coloring_hard(4, 0).unwrap());
        let g = coloring_hard(16, 3).unwrap();
        assert!((0..16).all(|v| g.degree(v) == 5));
        assert!((16..32).all(|v| g.degree(v) == 4));
        assert!(coloring_hard(8, 0).is_err());
        assert!(coloring_hard(9, 3).is_err());
    }

    #[test]
    fn matching_hard_small() {
        let g = matching_hard(6, 0).unwrap();
        assert_eq!(g.n(), 12);
        // L1 x R (6) + L2 x R1 (5) + matching (5)
        assert_eq!(g.m(), 16);
        assert!((1..6).all(|v| g.degree(v) == 2));
        assert_eq!(g, matching_hard(6, 0).unwrap());
        assert!(matching_hard(7, 0).is_err());
    }

    #[test]
    fn regular_like_degrees_bounded() {
        let g = gen(GraphModel::RegularLike { n: 200, degree: 10 }, 4);
        assert!(g.max_degree() <= 10);
        assert!(g.m() > 900);
    }

    #[test]
    fn union_relabels() {
        let g = gen(
            GraphModel::Union {
                parts: vec![
                    GraphModel::CliqueCollection {
                        clique_size: 3,
                        count: 1,
                    },
                    GraphModel::CliqueCollection {
                        clique_size: 4,
                        count: 1,
                    },
                ],
            },
            0,
        );
        assert_eq!((g.n(), g.m()), (7, 9));
        assert!(g.has_edge(3, 6));
    }

    #[test]
    fn rejects_delta_at_least_n() {
        assert!(gnp_capped(5, 0.5, 5, 0).is_err());
        assert!(regular_like(0, 0, 0).is_err());
    }

    #[test]
    fn spec_round_trips_through_json() {
        let spec = GeneratorSpec::new(GraphModel::ColoringHard { n: 16 }, 9);
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"model\":\"coloring_hard\""));
        let back: GeneratorSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }
}
