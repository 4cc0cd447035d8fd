use serde::{Deserialize, Serialize};

use super::{components_from_sets, HssDecomposition};
use crate::error::{invalid, Result};
use crate::graph::{sorted_intersection_count, DisjointSets, Edge, StreamEvent, Vertex};
use crate::hashing::{coin, derive_seed, hash2, ln_n};
use crate::sketch::{Fidelity, L0Sampler, SampleMode, SamplerConfig, SpaceAccountant, Universe};

/// Multipliers in the sampling budgets.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingConstants {
    /// Friend-set rate `friend·ln n/(δ²Δ)`.
    pub friend: f64,
    /// Stream dense-detection draws `dense_stream·n ln n/δ²`.
    pub dense_stream: f64,
    /// Query-model dense-detection rate `dense_query·ln n/(δ²Δ)`.
    pub dense_query: f64,
    /// Stream cut-sample size `cut_stream·c_cut·n ln n/δ²`.
    pub cut_stream: f64,
    /// Query-model cut-sample rate `cut_query·c_cut·ln n/Δ`.
    pub cut_query: f64,
    pub c_cut: f64,
}

impl Default for SamplingConstants {
    fn default() -> Self {
        SamplingConstants {
            friend: 10.0,
            dense_stream: 100.0,
            dense_query: 10.0,
            cut_stream: 10.0,
            cut_query: 4.0,
            c_cut: 1.0,
        }
    }
}

pub fn friend_sampling_rate(n: usize, delta: usize, dp: f64, c: &SamplingConstants) -> f64 {
    c.friend * ln_n(n) / (dp * dp * delta.max(1) as f64)
}

pub fn dense_sampling_rate(n: usize, delta: usize, dp: f64, c: &SamplingConstants) -> f64 {
    c.dense_query * ln_n(n) / (dp * dp * delta.max(1) as f64)
}

pub fn cut_sampling_rate(n: usize, delta: usize, c: &SamplingConstants) -> f64 {
    c.cut_query * c.c_cut * ln_n(n) / delta.max(1) as f64
}

pub fn dense_stream_budget(n: usize, dp: f64, c: &SamplingConstants) -> f64 {
    c.dense_stream * n as f64 * ln_n(n) / (dp * dp)
}

pub fn cut_stream_budget(n: usize, dp: f64, c: &SamplingConstants) -> f64 {
    c.cut_stream * c.c_cut * n as f64 * ln_n(n) / (dp * dp)
}

/// Each vertex joins `S` independently with probability `rate`.
pub fn select_friend_set(n: usize, rate: f64, seed: u64) -> Vec<Vertex> {
    (0..n as Vertex)
        .filter(|&v| coin(seed, v as u64, rate))
        .collect()
}

/// Answers "are `u`, `v` potential friends" from the neighborhoods of a
/// sampled vertex set `S`: Yes iff `|N(u) ∩ N(v) ∩ S| ≥ (1−1.5δ)Δp`.
#[derive(Clone, Debug)]
pub struct FriendOracle {
    delta: usize,
    dp: f64,
    rate: f64,
    threshold: f64,
    s_set: Vec<Vertex>,
    s_neighbors: Vec<Vec<Vertex>>,
}

impl FriendOracle {
    /// `edges` must contain every edge incident to `S`; others are ignored.
    pub fn from_edges<'a>(
        n: usize,
        delta: usize,
        dp: f64,
        rate: f64,
        s_set: Vec<Vertex>,
        edges: impl IntoIterator<Item = &'a Edge>,
    ) -> Self {
        let mut in_s = vec![false; n];
        for &s in &s_set {
            in_s[s as usize] = true;
        }
        let mut s_neighbors = vec![Vec::new(); n];
        for e in edges {
            if in_s[e.hi() as usize] {
                s_neighbors[e.lo() as usize].push(e.hi());
            }
            if in_s[e.lo() as usize] {
                s_neighbors[e.hi() as usize].push(e.lo());
            }
        }
        for row in &mut s_neighbors {
            row.sort_unstable();
            row.dedup();
        }
        let rate = rate.min(1.0);
        FriendOracle {
            delta,
            dp,
            rate,
            threshold: (1.0 - 1.5 * dp) * delta as f64 * rate,
            s_set,
            s_neighbors,
        }
    }

    pub fn s_set(&self) -> &[Vertex] {
        &self.s_set
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn delta_param(&self) -> f64 {
        self.dp
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn max_degree(&self) -> usize {
        self.delta
    }

    pub fn common_in_s(&self, u: Vertex, v: Vertex) -> usize {
        sorted_intersection_count(&self.s_neighbors[u as usize], &self.s_neighbors[v as usize])
    }

    pub fn is_friend(&self, u: Vertex, v: Vertex) -> bool {
        // cheap reject before the merge
        let need = self.threshold - 1e-9;
        let (mut a, mut b) = (&self.s_neighbors[u as usize][..], &self.s_neighbors[v as usize][..]);
        if a.len() > b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        if (a.len() as f64) < need {
            return false;
        }
        let need = need.max(0.0).ceil() as usize;
        // give up once too many entries of the shorter row have missed
        let mut misses_left = a.len() - need;
        let mut j = 0;
        for &x in a {
            while j < b.len() && b[j] < x {
                j += 1;
            }
            if j < b.len() && b[j] == x {
                j += 1;
            } else if misses_left == 0 {
                return false;
            } else {
                misses_left -= 1;
            }
        }
        true
    }

    /// Words held: one per stored S-neighbor entry plus the set itself.
    pub fn words(&self) -> u64 {
        (self.s_set.len() + self.s_neighbors.iter().map(Vec::len).sum::<usize>()) as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum DenseRule {
    /// `draws` edges sampled with replacement out of `m`; threshold `(1−δ)·draws·Δ/m`.
    Stream { dp: f64, draws: usize, m: usize },
    /// Every edge kept with probability `rate`; threshold `(1−1.5δ)Δ·rate`.
    Query { dp: f64, rate: f64 },
}

impl DenseRule {
    pub fn threshold(&self, delta: usize) -> f64 {
        match *self {
            DenseRule::Stream { dp, draws, m } => {
                if m == 0 {
                    f64::INFINITY
                } else {
                    (1.0 - dp) * draws as f64 * delta as f64 / m as f64
                }
            }
            DenseRule::Query { dp, rate } => (1.0 - 1.5 * dp) * delta as f64 * rate.min(1.0),
        }
    }
}

/// Vertices with enough sampled friend edges (samples may repeat).
pub fn detect_dense(
    n: usize,
    delta: usize,
    oracle: &FriendOracle,
    samples: &[Edge],
    rule: DenseRule,
) -> Vec<Vertex> {
    let threshold = rule.threshold(delta) - 1e-9;
    let mut count = vec![0usize; n];
    for e in samples {
        if oracle.is_friend(e.lo(), e.hi()) {
            count[e.lo() as usize] += 1;
            count[e.hi() as usize] += 1;
        }
    }
    (0..n as Vertex)
        .filter(|&v| count[v as usize] > 0 && count[v as usize] as f64 >= threshold)
        .collect()
}

/// Builds `H_s` on `dense` from the cut samples accepted by the oracle and
/// keeps components of size at least `(1−δ)Δ` as cliques.
pub fn components_to_decomposition(
    n: usize,
    delta: usize,
    eps: f64,
    oracle: &FriendOracle,
    dense: &[Vertex],
    cut_samples: &[Edge],
) -> HssDecomposition {
    let dp = oracle.delta_param();
    let mut in_d = vec![false; n];
    for &v in dense {
        in_d[v as usize] = true;
    }
    let mut sets = DisjointSets::new(n);
    for e in cut_samples {
        if in_d[e.lo() as usize] && in_d[e.hi() as usize] && oracle.is_friend(e.lo(), e.hi()) {
            sets.union(e.lo(), e.hi());
        }
    }
    let mut size = vec![0usize; n];
    for v in 0..n as Vertex {
        if in_d[v as usize] {
            size[sets.find(v) as usize] += 1;
        }
    }
    let min_size = (1.0 - dp) * delta as f64 - 1e-9;
    components_from_sets(eps, n, &mut sets, |v, root| {
        in_d[v as usize] && size[root as usize] as f64 >= min_size
    })
}

/// Sampled decomposition with hash-keyed Bernoulli choices for the friend
/// set, the dense-detection sample and the cut sample. `edges` must include
/// every edge incident to the friend set and every sampled edge; a superset
/// such as the full edge list gives the same answer.
pub fn bernoulli_decomposition_from_graph(
    n: usize,
    delta: usize,
    eps: f64,
    seed: u64,
    consts: &SamplingConstants,
    edges: &[Edge],
) -> Result<HssDecomposition> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("eps {eps} outside (0, 1)")));
    }
    if delta <= 1 {
        return Ok(HssDecomposition::all_sparse(eps, n));
    }
    let plan = BernoulliPlan::new(n, delta, eps, seed, consts);
    let oracle = FriendOracle::from_edges(
        n,
        delta,
        plan.dp,
        plan.friend_rate,
        plan.friend_set(n),
        edges,
    );
    let dense_samples: Vec<Edge> = edges.iter().copied().filter(|&e| plan.dense_sampled(n, e)).collect();
    let dense = detect_dense(
        n,
        delta,
        &oracle,
        &dense_samples,
        DenseRule::Query {
            dp: plan.dp,
            rate: plan.dense_rate,
        },
    );
    let cut: Vec<Edge> = edges.iter().copied().filter(|&e| plan.cut_sampled(n, e)).collect();
    Ok(components_to_decomposition(n, delta, eps, &oracle, &dense, &cut))
}

/// Rates and seeds of the Bernoulli sampled decomposition.
#[derive(Clone, Copy, Debug)]
pub struct BernoulliPlan {
    pub dp: f64,
    pub friend_rate: f64,
    pub dense_rate: f64,
    pub cut_rate: f64,
    pub friend_seed: u64,
    pub dense_seed: u64,
    pub cut_seed: u64,
}

impl BernoulliPlan {
    pub fn new(n: usize, delta: usize, eps: f64, seed: u64, consts: &SamplingConstants) -> Self {
        let dp = eps / 10.0;
        BernoulliPlan {
            dp,
            friend_rate: friend_sampling_rate(n, delta, dp, consts),
            dense_rate: dense_sampling_rate(n, delta, dp, consts),
            cut_rate: cut_sampling_rate(n, delta, consts),
            friend_seed: derive_seed(seed, "friend"),
            dense_seed: derive_seed(seed, "dense"),
            cut_seed: derive_seed(seed, "cut"),
        }
    }

    pub fn in_friend_set(&self, v: Vertex) -> bool {
        coin(self.friend_seed, v as u64, self.friend_rate)
    }

    pub fn friend_set(&self, n: usize) -> Vec<Vertex> {
        select_friend_set(n, self.friend_rate, self.friend_seed)
    }

    pub fn dense_sampled(&self, n: usize, e: Edge) -> bool {
        coin(self.dense_seed, e.key(n), self.dense_rate)
    }

    pub fn cut_sampled(&self, n: usize, e: Edge) -> bool {
        coin(self.cut_seed, e.key(n), self.cut_rate)
    }
}

/// One-pass friend-oracle builder: a sampler per friend-set vertex
/// recovering its whole neighborhood (`k = Δ`).
pub struct StreamFriendCollector {
    n: usize,
    delta: usize,
    dp: f64,
    rate: f64,
    s_set: Vec<Vertex>,
    slot: Vec<Option<usize>>,
    samplers: Vec<L0Sampler>,
}

impl StreamFriendCollector {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        delta: usize,
        dp: f64,
        consts: &SamplingConstants,
        fidelity: Fidelity,
        seed: u64,
        accountant: &mut SpaceAccountant,
    ) -> Result<Self> {
        if delta == 0 {
            return Err(invalid("friend oracle needs delta >= 1"));
        }
        let rate = friend_sampling_rate(n, delta, dp, consts);
        let s_set = select_friend_set(n, rate, seed);
        let mut slot = vec![None; n];
        let mut samplers = Vec::with_capacity(s_set.len());
        for (i, &s) in s_set.iter().enumerate() {
            slot[s as usize] = Some(i);
            let config = SamplerConfig::new(
                delta,
                SampleMode::WithoutReplacement,
                fidelity,
                hash2(seed, s as u64),
            )
            .with_support_bound(delta as u64);
            let sampler = L0Sampler::new(Universe::Incident { center: s, n }, config)?;
            sampler.register(accountant, "friend_samplers");
            samplers.push(sampler);
        }
        accountant.charge("friend_set", s_set.len() as u64);
        Ok(StreamFriendCollector {
            n,
            delta,
            dp,
            rate,
            s_set,
            slot,
            samplers,
        })
    }

    #[inline]
    pub fn process(&mut self, event: &StreamEvent) {
        for v in [event.edge.lo(), event.edge.hi()] {
            if let Some(i) = self.slot[v as usize] {
                self.samplers[i].process(event);
            }
        }
    }

    pub fn finish(&self) -> Result<FriendOracle> {
        let mut edges = Vec::new();
        for s in &self.samplers {
            edges.extend(s.recover_support()?);
        }
        Ok(FriendOracle::from_edges(
            self.n,
            self.delta,
            self.dp,
            self.rate,
            self.s_set.clone(),
            &edges,
        ))
    }
}

/// One-pass edge sampler over all pairs. Falls back to recovering the whole
/// edge set when the budget reaches `nΔ/2`.
pub struct StreamEdgeCollector {
    sampler: L0Sampler,
    exhaustive: bool,
    draws: usize,
    live: i64,
}

impl StreamEdgeCollector {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        delta: usize,
        budget: f64,
        mode: SampleMode,
        fidelity: Fidelity,
        seed: u64,
        label: &str,
        accountant: &mut SpaceAccountant,
    ) -> Result<Self> {
        let cap = (n as u64 * delta as u64 / 2).max(1);
        let exhaustive = budget >= cap as f64;
        let (k, mode) = if exhaustive {
            (cap as usize, SampleMode::WithoutReplacement)
        } else {
            ((budget.ceil() as usize).max(1), mode)
        };
        let config = SamplerConfig::new(k, mode, fidelity, seed).with_support_bound(cap);
        let sampler = L0Sampler::new(Universe::AllPairs { n: n.max(2) }, config)?;
        sampler.register(accountant, label);
        accountant.charge("edge_counter", 1);
        Ok(StreamEdgeCollector {
            sampler,
            exhaustive,
            draws: k,
            live: 0,
        })
    }

    #[inline]
    pub fn process(&mut self, event: &StreamEvent) {
        self.live += event.sign();
        self.sampler.process(event);
    }

    pub fn is_exhaustive(&self) -> bool {
        self.exhaustive
    }

    pub fn draws(&self) -> usize {
        self.draws
    }

    pub fn live_edges(&self) -> usize {
        self.live.max(0) as usize
    }

    pub fn finish(&self) -> Result<Vec<Edge>> {
        if self.exhaustive {
            self.sampler.recover_support()
        } else {
            self.sampler.recover()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::exact_extended_decomposition;
    use crate::graph::{generate, GeneratorSpec, Graph, GraphModel};

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

    fn oracle_for(g: &Graph, dp: f64, seed: u64, consts: &SamplingConstants) -> FriendOracle {
        let delta = g.max_degree();
        let rate = friend_sampling_rate(g.n(), delta, dp, consts);
        let s = select_friend_set(g.n(), rate, seed);
        let edges: Vec<Edge> = g.edges().collect();
        FriendOracle::from_edges(g.n(), delta, dp, rate, s, &edges)
    }

    #[test]
    fn clique_pairs_are_friends() {
        let g = Graph::complete(51);
        let consts = SamplingConstants::default();
        let yes = (0..100)
            .filter(|&seed| oracle_for(&g, 0.2, seed, &consts).is_friend(0, 1))
            .count();
        assert!(yes >= 99);
    }

    #[test]
    fn subsampled_oracle_still_finds_clique_friends() {
        // shrink the constant so S is a strict subset
        let consts = SamplingConstants {
            friend: 0.5,
            ..Default::default()
        };
        let g = cliques(101, 3);
        let o = oracle_for(&g, 0.2, 4, &consts);
        assert!(o.rate() < 1.0);
        assert!(o.s_set().len() < g.n());
        assert!(o.is_friend(0, 5));
        assert!(!o.is_friend(0, 150));
    }

    #[test]
    fn zero_common_neighbors_is_never_friend() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let o = oracle_for(&g, 0.1, 0, &SamplingConstants::default());
        assert!(!o.is_friend(0, 1));
    }

    #[test]
    fn oracle_is_deterministic() {
        let g = cliques(30, 4);
        let consts = SamplingConstants {
            friend: 0.2,
            ..Default::default()
        };
        let a = oracle_for(&g, 0.2, 9, &consts);
        let b = oracle_for(&g, 0.2, 9, &consts);
        assert_eq!(a.s_set(), b.s_set());
        for u in 0..20 {
            assert_eq!(a.is_friend(u, u + 1), b.is_friend(u, u + 1));
        }
    }

    #[test]
    fn friend_set_size_concentrates() {
        let rate = 0.05;
        for seed in 0..50 {
            let s = select_friend_set(10_000, rate, seed);
            assert!(s.len() as f64 <= 2.0 * 10_000.0 * rate);
        }
    }

    #[test]
    fn dense_detection_on_cliques_and_sparse() {
        let consts = SamplingConstants::default();
        let g = cliques(41, 5);
        let o = oracle_for(&g, 0.2, 1, &consts);
        let edges: Vec<Edge> = g.edges().collect();
        let d = detect_dense(g.n(), 40, &o, &edges, DenseRule::Query { dp: 0.2, rate: 1.0 });
        assert_eq!(d.len(), g.n());
        let sparse = generate(&GeneratorSpec::new(
            GraphModel::GnpCapped {
                n: 300,
                p: 0.1,
                max_degree: 30,
            },
            2,
        ))
        .unwrap();
        let o = oracle_for(&sparse, 0.2, 1, &consts);
        let edges: Vec<Edge> = sparse.edges().collect();
        let rule = DenseRule::Stream {
            dp: 0.2,
            draws: edges.len(),
            m: edges.len(),
        };
        assert!(detect_dense(300, sparse.max_degree(), &o, &edges, rule).is_empty());
    }

    #[test]
    fn exhaustive_sampled_matches_exact_on_cliques() {
        let g = cliques(65, 4);
        let edges: Vec<Edge> = g.edges().collect();
        let d = bernoulli_decomposition_from_graph(g.n(), 64, 0.5, 3, &SamplingConstants::default(), &edges)
            .unwrap();
        let exact = exact_extended_decomposition(&g, 0.1).unwrap();
        assert_eq!(d.cliques, exact.cliques);
        assert!(d.sparse.is_empty());
    }

    #[test]
    fn all_sparse_graph_gives_no_cliques() {
        let g = generate(&GeneratorSpec::new(
            GraphModel::GnpCapped {
                n: 400,
                p: 0.05,
                max_degree: 30,
            },
            5,
        ))
        .unwrap();
        let edges: Vec<Edge> = g.edges().collect();
        let d = bernoulli_decomposition_from_graph(400, g.max_degree(), 0.5, 1, &SamplingConstants::default(), &edges)
            .unwrap();
        assert!(d.cliques.is_empty());
    }

    #[test]
    fn stream_collectors_recover_neighborhoods() {
        let g = cliques(12, 3);
        let events: Vec<StreamEvent> = g.edges().map(StreamEvent::insert).collect();
        let mut acc = SpaceAccountant::new();
        let consts = SamplingConstants::default();
        let mut fc =
            StreamFriendCollector::new(g.n(), 11, 0.2, &consts, Fidelity::Sketch, 3, &mut acc).unwrap();
        let mut ec = StreamEdgeCollector::new(
            g.n(),
            11,
            1e9,
            SampleMode::WithReplacement,
            Fidelity::Sketch,
            4,
            "dense_sampler",
            &mut acc,
        )
        .unwrap();
        for ev in &events {
            fc.process(ev);
            ec.process(ev);
        }
        let oracle = fc.finish().unwrap();
        assert_eq!(oracle.s_set().len(), g.n());
        assert!(oracle.is_friend(0, 1));
        assert!(ec.is_exhaustive());
        assert_eq!(ec.finish().unwrap(), events.iter().map(|e| e.edge).collect::<Vec<_>>());
        assert_eq!(ec.live_edges(), g.m());
        assert!(acc.words_for("friend_samplers") > 0);
    }
}
