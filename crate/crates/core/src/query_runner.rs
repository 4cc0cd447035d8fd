//! Coloring through degree, neighbor and pair queries.

use serde::{Deserialize, Serialize};

use crate::coloring::{list_color_conflict, PhaseReport, PipelineConfig};
use crate::decomposition::{
    bernoulli_decomposition_from_graph, components_to_decomposition, BernoulliPlan, DenseRule,
    FriendOracle, HssDecomposition, SamplingConstants,
};
use crate::error::{Error, Result};
use crate::graph::{Color, Edge, QueryOracle, Vertex};
use crate::hashing::{coin, derive_seed, hash2, ln_n};
use crate::palette::{build_conflict_graph_queries, PaletteSpec};
use crate::SCHEMA_VERSION;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryRunConfig {
    pub palette: PaletteSpec,
    pub eps: f64,
    pub consts: SamplingConstants,
    pub seed: u64,
    pub pipeline: PipelineConfig,
    /// Greedy runs when `Δ` is at most this; defaults to `⌊√n⌋`.
    pub greedy_threshold: Option<usize>,
}

impl QueryRunConfig {
    pub fn new(seed: u64) -> Self {
        QueryRunConfig {
            palette: PaletteSpec::default(),
            eps: 1.0 / 6.0,
            consts: SamplingConstants::default(),
            seed,
            pipeline: PipelineConfig::default(),
            greedy_threshold: None,
        }
    }

    pub fn threshold(&self, n: usize) -> usize {
        self.greedy_threshold.unwrap_or_else(|| n.isqrt())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryBranch {
    Greedy,
    Sparsification,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryReport {
    pub schema_version: u32,
    pub branch: QueryBranch,
    pub degree_q: u64,
    pub neighbor_q: u64,
    pub pair_q: u64,
    pub total: u64,
    pub baseline_m: usize,
    /// `total / (n²·ln² n/Δ)`.
    pub bound_constant: f64,
    pub full_read: bool,
    pub conflict_edges: usize,
    pub pipeline: Option<PhaseReport>,
}

#[derive(Clone, Debug)]
pub struct QueryOutcome {
    pub colors: Vec<Color>,
    pub decomposition: Option<HssDecomposition>,
    pub report: QueryReport,
}

/// All neighbors of `v`, probing indices until the oracle reports the end
/// of the row. Probes past the end are not charged.
fn read_row(oracle: &mut QueryOracle<'_>, v: Vertex) -> Result<Vec<Vertex>> {
    let mut row = Vec::new();
    loop {
        match oracle.neighbor(v, row.len() + 1) {
            Ok(u) => row.push(u),
            Err(Error::NeighborIndexOutOfRange { .. }) => return Ok(row),
            Err(e) => return Err(e),
        }
    }
}

/// Ascending-order greedy reading every adjacency list once.
pub fn greedy_small_delta(oracle: &mut QueryOracle<'_>) -> Result<Vec<Color>> {
    let n = oracle.n();
    let mut colors: Vec<Color> = vec![0; n];
    let mut seen: Vec<usize> = vec![usize::MAX; n + 2];
    for v in 0..n as Vertex {
        for u in read_row(oracle, v)? {
            let c = colors[u as usize] as usize;
            if c > 0 {
                seen[c] = v as usize;
            }
        }
        colors[v as usize] = (1..).find(|&c| seen[c] != v as usize).unwrap() as Color;
    }
    Ok(colors)
}

fn full_read_edges(oracle: &mut QueryOracle<'_>) -> Result<Vec<Edge>> {
    let mut edges = Vec::new();
    for v in 0..oracle.n() as Vertex {
        edges.extend(read_row(oracle, v)?.into_iter().filter(|&u| u > v).map(|u| Edge::new(v, u)));
    }
    Ok(edges)
}

/// Sampled decomposition: pair queries from the friend set, and neighbor
/// slots kept with hash coins for dense detection and for the cut sample.
fn sampled_decomposition(
    oracle: &mut QueryOracle<'_>,
    n: usize,
    delta: usize,
    eps: f64,
    plan: &BernoulliPlan,
) -> Result<HssDecomposition> {
    let s_set = plan.friend_set(n);
    let mut in_s = vec![false; n];
    for &s in &s_set {
        in_s[s as usize] = true;
    }
    let mut s_edges = Vec::new();
    for &s in &s_set {
        for u in 0..n as Vertex {
            if u == s || (in_s[u as usize] && u < s) {
                continue;
            }
            if oracle.pair(s, u)? {
                s_edges.push(Edge::new(s, u));
            }
        }
    }
    let friends = FriendOracle::from_edges(n, delta, plan.dp, plan.friend_rate, s_set, &s_edges);
    let rule = DenseRule::Query {
        dp: plan.dp,
        rate: plan.dense_rate,
    };
    let threshold = rule.threshold(delta) - 1e-9;
    let mut dense = Vec::new();
    let mut cut = Vec::new();
    for v in 0..n as Vertex {
        let d = oracle.degree(v)?;
        let mut count = 0usize;
        for i in 1..=d {
            let take_dense = coin(hash2(plan.dense_seed, v as u64), i as u64, plan.dense_rate);
            let take_cut = coin(hash2(plan.cut_seed, v as u64), i as u64, plan.cut_rate);
            if !take_dense && !take_cut {
                continue;
            }
            let u = oracle.neighbor(v, i)?;
            if take_dense && friends.is_friend(v, u) {
                count += 1;
            }
            if take_cut {
                cut.push(Edge::new(v, u));
            }
        }
        if count > 0 && count as f64 >= threshold {
            dense.push(v);
        }
    }
    Ok(components_to_decomposition(n, delta, eps, &friends, &dense, &cut))
}

pub fn run_query_model(
    oracle: &mut QueryOracle<'_>,
    n: usize,
    delta: usize,
    config: &QueryRunConfig,
) -> Result<QueryOutcome> {
    let baseline_m = oracle.baseline_m();
    let bound = |total: u64| {
        let l = ln_n(n);
        total as f64 / (n as f64 * n as f64 * l * l / delta.max(1) as f64)
    };
    if delta <= config.threshold(n) {
        let colors = greedy_small_delta(oracle)?;
        let q = oracle.counts();
        return Ok(QueryOutcome {
            colors,
            decomposition: None,
            report: QueryReport {
                schema_version: SCHEMA_VERSION,
                branch: QueryBranch::Greedy,
                degree_q: q.degree,
                neighbor_q: q.neighbor,
                pair_q: q.pair,
                total: q.total(),
                baseline_m,
                bound_constant: bound(q.total()),
                full_read: true,
                conflict_edges: 0,
                pipeline: None,
            },
        });
    }

    let palette = config.palette.sample(n, delta, derive_seed(config.seed, "palette"))?;
    let conflict = build_conflict_graph_queries(oracle, &palette)?.graph;
    let plan = BernoulliPlan::new(n, delta, config.eps, derive_seed(config.seed, "decomposition"), &config.consts);
    let full_read = plan.friend_rate >= 1.0;
    let decomposition = if full_read {
        let edges = full_read_edges(oracle)?;
        bernoulli_decomposition_from_graph(
            n,
            delta,
            config.eps,
            derive_seed(config.seed, "decomposition"),
            &config.consts,
            &edges,
        )?
    } else {
        sampled_decomposition(oracle, n, delta, config.eps, &plan)?
    };
    let pipeline = PipelineConfig {
        strict_list: true,
        ..config.pipeline
    };
    let out = list_color_conflict(&conflict, None, &decomposition, &palette, &pipeline)?;
    let q = oracle.counts();
    Ok(QueryOutcome {
        colors: out.colors(),
        decomposition: Some(decomposition),
        report: QueryReport {
            schema_version: SCHEMA_VERSION,
            branch: QueryBranch::Sparsification,
            degree_q: q.degree,
            neighbor_q: q.neighbor,
            pair_q: q.pair,
            total: q.total(),
            baseline_m,
            bound_constant: bound(q.total()),
            full_read,
            conflict_edges: conflict.m(),
            pipeline: Some(out.report),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn greedy_on_k3_and_empty() {
        let g = Graph::complete(3);
        let mut o = QueryOracle::new(&g);
        assert_eq!(greedy_small_delta(&mut o).unwrap(), vec![1, 2, 3]);
        assert_eq!(o.counts().neighbor, 6);
        assert_eq!(o.counts().total(), 6);
        let e = Graph::empty(4);
        let mut o = QueryOracle::new(&e);
        assert_eq!(greedy_small_delta(&mut o).unwrap(), vec![1; 4]);
        assert_eq!(o.counts().total(), 0);
    }

    #[test]
    fn path_takes_greedy_branch() {
        let g = Graph::from_edges(6, (0..5).map(|i| (i, i + 1))).unwrap();
        let mut o = QueryOracle::new(&g);
        let out = run_query_model(&mut o, 6, 2, &QueryRunConfig::new(1)).unwrap();
        assert_eq!(out.report.branch, QueryBranch::Greedy);
        assert_eq!(out.report.pair_q, 0);
        assert_eq!(out.report.total, 10);
    }

    #[test]
    fn sparsification_branch_on_clique() {
        let g = Graph::complete(12);
        let mut o = QueryOracle::new(&g);
        let out = run_query_model(&mut o, 12, 11, &QueryRunConfig::new(3)).unwrap();
        assert_eq!(out.report.branch, QueryBranch::Sparsification);
        let mut c = out.colors.clone();
        c.sort_unstable();
        assert_eq!(c, (1..=12).collect::<Vec<_>>());
    }

    #[test]
    fn sampled_path_is_proper() {
        let mut cfg = QueryRunConfig::new(4);
        cfg.eps = 0.9;
        cfg.consts.friend = 0.05;
        cfg.consts.dense_query = 0.05;
        let g = crate::graph::generate(&crate::graph::GeneratorSpec {
            model: crate::graph::GraphModel::GnpCapped { n: 400, p: 0.2, max_degree: 60 },
            seed: 2,
        })
        .unwrap();
        let delta = g.max_degree();
        let mut o = QueryOracle::new(&g);
        let out = run_query_model(&mut o, 400, delta, &cfg).unwrap();
        assert!(!out.report.full_read);
        assert!(out.report.degree_q > 0);
        assert!(g.edges().all(|e| out.colors[e.lo() as usize] != out.colors[e.hi() as usize]));
    }
}
