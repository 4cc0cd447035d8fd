//! Per-vertex color lists, color classes and conflict graphs.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::{Color, Edge, Graph, QueryOracle, StreamEvent, Vertex};
use crate::hashing::{hash2, ln_n, rng_from};
use crate::sketch::{Fidelity, L0Sampler, SampleMode, SamplerConfig, SpaceAccountant, Universe};
use crate::SCHEMA_VERSION;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PaletteParams {
    /// Each batch includes each color independently with probability `p`.
    /// `full` is set when Δ+1 is small enough that every vertex keeps all colors.
    Bernoulli {
        alpha: f64,
        epsilon: f64,
        p: f64,
        full: bool,
    },
    /// A uniform `k`-subset split into three batches.
    Uniform { k: usize },
    /// Lists supplied by the caller.
    Explicit,
}

#[derive(Clone, Debug)]
pub struct Palette {
    delta: usize,
    params: PaletteParams,
    seed: u64,
    batches: Vec<[Vec<Color>; 3]>,
    flat: Vec<Vec<Color>>,
    mask_words: usize,
    masks: Vec<u64>,
}

/// `⌈c·ln n⌉` clamped to `[1, Δ+1]`.
pub fn default_list_size(n: usize, delta: usize, c: f64) -> usize {
    ((c * ln_n(n)).ceil() as usize).clamp(1, delta + 1)
}

/// Batch sizes for a uniform list of size `k`.
pub fn batch_split(k: usize) -> [usize; 3] {
    let b1 = k.div_ceil(3);
    let b2 = (k - b1) / 2;
    [b1, b2, k - b1 - b2]
}

impl Palette {
    pub fn from_batches(
        delta: usize,
        batches: Vec<[Vec<Color>; 3]>,
        params: PaletteParams,
        seed: u64,
    ) -> Result<Self> {
        let colors = delta as Color + 1;
        let mask_words = (delta + 1).div_ceil(64);
        let mut flat = Vec::with_capacity(batches.len());
        let mut masks = vec![0u64; batches.len() * mask_words];
        for (v, b) in batches.iter().enumerate() {
            let mut list: Vec<Color> = b.iter().flatten().copied().collect();
            list.sort_unstable();
            list.dedup();
            if let Some(&c) = list.iter().find(|&&c| c == 0 || c > colors) {
                return Err(invalid(format!("color {c} of vertex {v} outside [1, {colors}]")));
            }
            for &c in &list {
                let i = (c - 1) as usize;
                masks[v * mask_words + i / 64] |= 1 << (i % 64);
            }
            flat.push(list);
        }
        Ok(Palette {
            delta,
            params,
            seed,
            batches,
            flat,
            mask_words,
            masks,
        })
    }

    /// Lists given as flat sets; everything goes into the first batch.
    pub fn from_lists(delta: usize, lists: Vec<Vec<Color>>) -> Result<Self> {
        let batches = lists.into_iter().map(|l| [l, vec![], vec![]]).collect();
        Self::from_batches(delta, batches, PaletteParams::Explicit, 0)
    }

    pub fn n(&self) -> usize {
        self.flat.len()
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    /// Palette size Δ+1.
    pub fn colors(&self) -> usize {
        self.delta + 1
    }

    pub fn params(&self) -> PaletteParams {
        self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// First batch in sampling order.
    pub fn l1(&self, v: Vertex) -> &[Color] {
        &self.batches[v as usize][0]
    }

    pub fn l2(&self, v: Vertex) -> &[Color] {
        &self.batches[v as usize][1]
    }

    pub fn l3(&self, v: Vertex) -> &[Color] {
        &self.batches[v as usize][2]
    }

    /// Sorted union of the three batches.
    pub fn list(&self, v: Vertex) -> &[Color] {
        &self.flat[v as usize]
    }

    pub fn max_list_size(&self) -> usize {
        self.flat.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn total_size(&self) -> usize {
        self.flat.iter().map(Vec::len).sum()
    }

    #[inline]
    fn mask(&self, v: Vertex) -> &[u64] {
        let s = v as usize * self.mask_words;
        &self.masks[s..s + self.mask_words]
    }

    #[inline]
    pub fn contains(&self, v: Vertex, c: Color) -> bool {
        if c == 0 || c as usize > self.colors() {
            return false;
        }
        let i = (c - 1) as usize;
        self.mask(v)[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn shares_color(&self, u: Vertex, v: Vertex) -> bool {
        self.mask(u).iter().zip(self.mask(v)).any(|(a, b)| a & b != 0)
    }

    pub fn to_json(&self) -> PaletteFile {
        let lists = self
            .flat
            .iter()
            .enumerate()
            .map(|(v, l)| (v.to_string(), l.clone()))
            .collect();
        let batches = self
            .batches
            .iter()
            .enumerate()
            .map(|(v, b)| (v.to_string(), b.clone()))
            .collect();
        PaletteFile {
            schema_version: SCHEMA_VERSION,
            params: self.params,
            n: self.n(),
            delta: self.delta,
            seed: self.seed,
            lists,
            batches,
        }
    }

    pub fn from_json(file: &PaletteFile) -> Result<Self> {
        let mut batches: Vec<[Vec<Color>; 3]> = vec![Default::default(); file.n];
        let source: Vec<(&String, [Vec<Color>; 3])> = if file.batches.is_empty() {
            file.lists
                .iter()
                .map(|(k, l)| (k, [l.clone(), vec![], vec![]]))
                .collect()
        } else {
            file.batches.iter().map(|(k, b)| (k, b.clone())).collect()
        };
        for (key, b) in source {
            let v: usize = key
                .parse()
                .map_err(|_| invalid(format!("bad vertex key {key:?}")))?;
            if v >= file.n {
                return Err(invalid(format!("vertex {v} out of range")));
            }
            batches[v] = b;
        }
        Self::from_batches(file.delta, batches, file.params, file.seed)
    }
}

/// JSON form: vertex → sorted colors, with the sampling parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PaletteFile {
    pub schema_version: u32,
    pub params: PaletteParams,
    pub n: usize,
    pub delta: usize,
    pub seed: u64,
    pub lists: BTreeMap<String, Vec<Color>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub batches: BTreeMap<String, [Vec<Color>; 3]>,
}

fn vertex_rng(seed: u64, v: usize) -> rand_chacha::ChaCha8Rng {
    rng_from(hash2(seed, v as u64))
}

pub fn sample_palettes_bernoulli(
    n: usize,
    delta: usize,
    alpha: f64,
    epsilon: f64,
    seed: u64,
) -> Result<Palette> {
    if alpha <= 0.0 || !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid("need alpha > 0 and 0 < epsilon < 1"));
    }
    let colors = delta + 1;
    let budget = alpha * ln_n(n) / (epsilon * epsilon);
    let full = colors as f64 <= budget;
    let p = (budget / (3.0 * colors as f64)).min(1.0);
    let batches = (0..n)
        .map(|v| {
            let mut rng = vertex_rng(seed, v);
            let batch = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<Color> {
                (1..=colors as Color)
                    .filter(|_| full || p >= 1.0 || rng.random::<f64>() < p)
                    .collect()
            };
            let mut l1 = batch(&mut rng);
            l1.shuffle(&mut rng);
            let l2 = batch(&mut rng);
            let l3 = batch(&mut rng);
            [l1, l2, l3]
        })
        .collect();
    let params = PaletteParams::Bernoulli {
        alpha,
        epsilon,
        p,
        full,
    };
    Palette::from_batches(delta, batches, params, seed)
}

pub fn sample_palettes_uniform(n: usize, delta: usize, k: usize, seed: u64) -> Result<Palette> {
    if k == 0 || k > delta + 1 {
        return Err(invalid(format!("list size {k} outside [1, {}]", delta + 1)));
    }
    let [b1, b2, _] = batch_split(k);
    let batches = (0..n)
        .map(|v| {
            let mut rng = vertex_rng(seed, v);
            let picked: Vec<Color> = index::sample(&mut rng, delta + 1, k)
                .into_iter()
                .map(|i| i as Color + 1)
                .collect();
            let l1 = picked[..b1].to_vec();
            let mut l2 = picked[b1..b1 + b2].to_vec();
            let mut l3 = picked[b1 + b2..].to_vec();
            l2.sort_unstable();
            l3.sort_unstable();
            [l1, l2, l3]
        })
        .collect();
    Palette::from_batches(delta, batches, PaletteParams::Uniform { k }, seed)
}

/// How lists are drawn, as given on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PaletteSpec {
    /// `k` colors per vertex; `None` means `⌈8 ln n⌉`.
    Uniform { k: Option<usize> },
    Bernoulli { alpha: f64, epsilon: f64 },
}

impl Default for PaletteSpec {
    fn default() -> Self {
        PaletteSpec::Uniform { k: None }
    }
}

impl PaletteSpec {
    pub fn sample(&self, n: usize, delta: usize, seed: u64) -> Result<Palette> {
        match *self {
            PaletteSpec::Uniform { k } => {
                let k = k.map_or_else(|| default_list_size(n, delta, 8.0), |k| k.min(delta + 1));
                sample_palettes_uniform(n, delta, k, seed)
            }
            PaletteSpec::Bernoulli { alpha, epsilon } => {
                sample_palettes_bernoulli(n, delta, alpha, epsilon, seed)
            }
        }
    }
}

impl std::str::FromStr for PaletteSpec {
    type Err = crate::Error;

    /// `uniform`, `uniform:K` or `bernoulli:ALPHA,EPS`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
        let bad = || invalid(format!("bad palette spec {s:?}"));
        match kind {
            "uniform" if arg.is_empty() => Ok(PaletteSpec::Uniform { k: None }),
            "uniform" => {
                let k: usize = arg.parse().map_err(|_| bad())?;
                if k == 0 {
                    return Err(bad());
                }
                Ok(PaletteSpec::Uniform { k: Some(k) })
            }
            "bernoulli" => {
                let (a, e) = arg.split_once(',').ok_or_else(bad)?;
                Ok(PaletteSpec::Bernoulli {
                    alpha: a.trim().parse().map_err(|_| bad())?,
                    epsilon: e.trim().parse().map_err(|_| bad())?,
                })
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorClasses {
    classes: Vec<Vec<Vertex>>,
}

impl ColorClasses {
    /// Sorted members of `χ_c`.
    pub fn class(&self, c: Color) -> &[Vertex] {
        &self.classes[(c - 1) as usize]
    }

    pub fn colors(&self) -> usize {
        self.classes.len()
    }

    pub fn max_class_size(&self) -> usize {
        self.classes.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn total_size(&self) -> usize {
        self.classes.iter().map(Vec::len).sum()
    }
}

pub fn build_color_classes(palette: &Palette) -> ColorClasses {
    let mut classes = vec![Vec::new(); palette.colors()];
    for v in 0..palette.n() as Vertex {
        for &c in palette.list(v) {
            classes[(c - 1) as usize].push(v);
        }
    }
    ColorClasses { classes }
}

/// Calls `f(u, v)` for every pair `u < v` sharing a color, in lexicographic
/// order. Picks the cheaper of a class walk and an all-pairs mask scan.
pub fn for_each_sharing_pair(palette: &Palette, mut f: impl FnMut(Vertex, Vertex)) {
    let n = palette.n();
    let classes = build_color_classes(palette);
    let class_cost: u128 = classes.classes.iter().map(|c| (c.len() as u128).pow(2)).sum();
    let scan_cost = (n as u128 * n as u128 / 2) * palette.mask_words as u128;
    if scan_cost <= class_cost {
        for u in 0..n as Vertex {
            for v in u + 1..n as Vertex {
                if palette.shares_color(u, v) {
                    f(u, v);
                }
            }
        }
        return;
    }
    let mut stamp = vec![u32::MAX; n];
    let mut row = Vec::new();
    for u in 0..n as Vertex {
        row.clear();
        for &c in palette.list(u) {
            for &v in classes.class(c) {
                if v > u && stamp[v as usize] != u {
                    stamp[v as usize] = u;
                    row.push(v);
                }
            }
        }
        row.sort_unstable();
        for &v in &row {
            f(u, v);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Offline,
    Queries,
    Stream,
}

#[derive(Clone, Debug)]
pub struct ConflictGraph {
    pub graph: Graph,
    pub provenance: Provenance,
}

pub fn build_conflict_graph_offline(graph: &Graph, palette: &Palette) -> ConflictGraph {
    ConflictGraph {
        graph: graph.filter_edges(|e| palette.shares_color(e.lo(), e.hi())),
        provenance: Provenance::Offline,
    }
}

/// Pair queries issued by [`build_conflict_graph_queries`], in order. A
/// function of the palette alone.
pub fn conflict_query_plan(palette: &Palette) -> Vec<Edge> {
    let mut pairs = Vec::new();
    for_each_sharing_pair(palette, |u, v| pairs.push(Edge::new(u, v)));
    pairs
}

/// One pair query per vertex pair sharing a color.
pub fn build_conflict_graph_queries(
    oracle: &mut QueryOracle<'_>,
    palette: &Palette,
) -> Result<ConflictGraph> {
    let mut edges = Vec::new();
    let mut failure = None;
    for_each_sharing_pair(palette, |u, v| {
        if failure.is_some() {
            return;
        }
        match oracle.pair(u, v) {
            Ok(true) => edges.push(Edge::new(u, v)),
            Ok(false) => {}
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(ConflictGraph {
        graph: Graph::from_edge_vec(palette.n(), edges)?,
        provenance: Provenance::Queries,
    })
}

/// Conflict-degree budget `⌈4·K²⌉` for the largest list size `K`.
pub fn default_k_per_vertex(palette: &Palette) -> usize {
    let k = palette.max_list_size().max(1);
    4 * k * k
}

/// Number of vertices sharing a color with each vertex.
pub fn sharing_degrees(palette: &Palette) -> Vec<u64> {
    let mut deg = vec![0u64; palette.n()];
    for_each_sharing_pair(palette, |u, v| {
        deg[u as usize] += 1;
        deg[v as usize] += 1;
    });
    deg
}

/// One-pass conflict-graph builder: a sampler per vertex over the pairs
/// incident to it whose other endpoint shares a color.
pub struct StreamConflictCollector {
    n: usize,
    samplers: Vec<Option<L0Sampler>>,
}

impl StreamConflictCollector {
    pub fn new(
        palette: Arc<Palette>,
        k_per_vertex: usize,
        support_bound: Option<u64>,
        fidelity: Fidelity,
        seed: u64,
        accountant: &mut SpaceAccountant,
    ) -> Result<Self> {
        let n = palette.n();
        let sizes = sharing_degrees(&palette);
        let mut samplers = Vec::with_capacity(n);
        for v in 0..n as Vertex {
            if sizes[v as usize] == 0 {
                samplers.push(None);
                continue;
            }
            let pal = Arc::clone(&palette);
            let universe = Universe::Filtered {
                n,
                size: sizes[v as usize],
                filter: Arc::new(move |e: Edge| e.touches(v) && pal.shares_color(e.lo(), e.hi())),
            };
            let mut config = SamplerConfig::new(
                k_per_vertex,
                SampleMode::WithoutReplacement,
                fidelity,
                hash2(seed, v as u64),
            );
            if let Some(b) = support_bound {
                config = config.with_support_bound(b);
            }
            let s = L0Sampler::new(universe, config)?;
            s.register(accountant, "conflict_samplers");
            samplers.push(Some(s));
        }
        Ok(StreamConflictCollector { n, samplers })
    }

    #[inline]
    pub fn process(&mut self, event: &StreamEvent) {
        for v in [event.edge.lo(), event.edge.hi()] {
            if let Some(s) = self.samplers.get_mut(v as usize).and_then(Option::as_mut) {
                s.process(event);
            }
        }
    }

    pub fn finish(&self) -> Result<ConflictGraph> {
        let mut edges = Vec::new();
        for s in self.samplers.iter().flatten() {
            edges.extend(s.recover_support()?);
        }
        Ok(ConflictGraph {
            graph: Graph::from_edges_dedup(self.n, edges),
            provenance: Provenance::Stream,
        })
    }
}

pub fn build_conflict_graph_stream(
    palette: Arc<Palette>,
    events: &[StreamEvent],
    k_per_vertex: usize,
    fidelity: Fidelity,
    seed: u64,
    accountant: &mut SpaceAccountant,
) -> Result<ConflictGraph> {
    let mut collector =
        StreamConflictCollector::new(palette, k_per_vertex, None, fidelity, seed, accountant)?;
    for ev in events {
        collector.process(ev);
    }
    collector.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn palette_spec_parses() {
        assert_eq!("uniform".parse::<PaletteSpec>().unwrap(), PaletteSpec::Uniform { k: None });
        assert_eq!("uniform:7".parse::<PaletteSpec>().unwrap(), PaletteSpec::Uniform { k: Some(7) });
        assert_eq!(
            "bernoulli:2,0.5".parse::<PaletteSpec>().unwrap(),
            PaletteSpec::Bernoulli { alpha: 2.0, epsilon: 0.5 }
        );
        assert!("uniform:0".parse::<PaletteSpec>().is_err());
        assert!("zipf".parse::<PaletteSpec>().is_err());
        let p = PaletteSpec::Uniform { k: Some(50) }.sample(4, 3, 1).unwrap();
        assert_eq!(p.max_list_size(), 4);
    }
    use crate::graph::{generate, to_stream, GeneratorSpec, GraphModel};

    #[test]
    fn bernoulli_caps_at_one() {
        let pal = sample_palettes_bernoulli(50, 9, 5000.0, 1.0 / 5000.0, 1).unwrap();
        assert!(matches!(pal.params(), PaletteParams::Bernoulli { p, full: true, .. } if p == 1.0));
        assert!((0..50).all(|v| pal.list(v).len() == 10));
        let pal = sample_palettes_bernoulli(2, 0, 1.0, 0.5, 3).unwrap();
        assert_eq!(pal.list(0), &[1]);
        assert_eq!(pal.list(1), &[1]);
    }

    #[test]
    fn bernoulli_batch_sizes_concentrate() {
        // alpha chosen so that p = 0.2 exactly
        let (n, delta, eps) = (1000, 100, 0.5);
        let alpha = 0.2 * 3.0 * eps * eps * 101.0 / (n as f64).ln();
        let pal = sample_palettes_bernoulli(n, delta, alpha, eps, 8).unwrap();
        let PaletteParams::Bernoulli { p, full, .. } = pal.params() else {
            panic!()
        };
        assert!(!full);
        assert!((p - 0.2).abs() < 1e-12);
        let mean = (0..n as Vertex).map(|v| pal.l2(v).len()).sum::<usize>() as f64 / n as f64;
        let sigma = (101.0 * 0.2 * 0.8 / n as f64).sqrt();
        assert!((mean - 20.2).abs() < 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn uniform_full_and_split() {
        let pal = sample_palettes_uniform(5, 2, 3, 0).unwrap();
        assert!((0..5).all(|v| pal.list(v) == [1, 2, 3]));
        assert_eq!(batch_split(45), [15, 15, 15]);
        assert_eq!(batch_split(61), [21, 20, 20]);
        assert_eq!(batch_split(3), [1, 1, 1]);
        assert!(sample_palettes_uniform(5, 2, 0, 0).is_err());
        assert!(sample_palettes_uniform(5, 2, 4, 0).is_err());
    }

    #[test]
    fn uniform_single_color_frequency() {
        let n = 20_200;
        let pal = sample_palettes_uniform(n, 100, 1, 4).unwrap();
        let classes = build_color_classes(&pal);
        let expect = n as f64 / 101.0;
        let sd = (n as f64 * (1.0 / 101.0) * (100.0 / 101.0)).sqrt();
        for c in 1..=101 {
            let got = classes.class(c).len() as f64;
            assert!((got - expect).abs() < 5.0 * sd, "color {c}: {got}");
        }
    }

    #[test]
    fn classes_invert_palette() {
        let pal = Palette::from_lists(1, vec![vec![1], vec![1, 2]]).unwrap();
        let cl = build_color_classes(&pal);
        assert_eq!(cl.class(1), &[0, 1]);
        assert_eq!(cl.class(2), &[1]);
        let pal = sample_palettes_uniform(300, 40, 7, 2).unwrap();
        assert_eq!(build_color_classes(&pal).total_size(), pal.total_size());
    }

    #[test]
    fn rejects_out_of_range_colors() {
        assert!(Palette::from_lists(1, vec![vec![3]]).is_err());
        assert!(Palette::from_lists(1, vec![vec![0]]).is_err());
    }

    #[test]
    fn conflict_graph_trivial_cases() {
        let k3 = Graph::complete(3);
        let disjoint = Palette::from_lists(2, vec![vec![1], vec![2], vec![3]]).unwrap();
        assert_eq!(build_conflict_graph_offline(&k3, &disjoint).graph.m(), 0);
        let mut o = QueryOracle::new(&k3);
        assert_eq!(build_conflict_graph_queries(&mut o, &disjoint).unwrap().graph.m(), 0);
        assert_eq!(o.counts().pair, 0);
        let all = Palette::from_lists(2, vec![vec![1, 2, 3]; 3]).unwrap();
        assert_eq!(build_conflict_graph_offline(&k3, &all).graph.m(), 3);
    }

    #[test]
    fn single_shared_class_one_query() {
        let g = Graph::from_edges(3, [(0, 2)]).unwrap();
        let pal = Palette::from_lists(2, vec![vec![1], vec![2], vec![1]]).unwrap();
        let mut o = QueryOracle::new(&g);
        let cg = build_conflict_graph_queries(&mut o, &pal).unwrap();
        assert_eq!(o.counts().pair, 1);
        assert!(cg.graph.has_edge(0, 2));
    }

    fn sample_instance(seed: u64) -> (Graph, Palette) {
        let g = generate(&GeneratorSpec::new(
            GraphModel::GnpCapped {
                n: 200,
                p: 40.0 / 199.0,
                max_degree: 40,
            },
            seed,
        ))
        .unwrap();
        let k = default_list_size(200, 40, 8.0);
        let pal = sample_palettes_uniform(200, 40, k, seed + 1).unwrap();
        (g, pal)
    }

    #[test]
    fn offline_matches_brute_force_and_queries() {
        for seed in 0..5 {
            let (g, pal) = sample_instance(seed);
            let brute = g
                .edges()
                .filter(|e| pal.list(e.lo()).iter().any(|c| pal.list(e.hi()).contains(c)))
                .count();
            let off = build_conflict_graph_offline(&g, &pal);
            assert_eq!(off.graph.m(), brute);
            let mut o = QueryOracle::new(&g);
            let q = build_conflict_graph_queries(&mut o, &pal).unwrap();
            assert_eq!(q.graph, off.graph);
            let classes = build_color_classes(&pal);
            let bound: usize = (1..=41).map(|c| classes.class(c).len().pow(2)).sum();
            assert!(o.counts().pair as usize <= bound);
        }
    }

    #[test]
    fn stream_ideal_matches_offline() {
        for fidelity in [Fidelity::Ideal, Fidelity::Sketch] {
            let (g, pal) = sample_instance(9);
            let pal = Arc::new(pal);
            let events = to_stream(&g, 0.3, 2).unwrap();
            let mut acc = SpaceAccountant::new();
            let k = default_k_per_vertex(&pal);
            let cg =
                build_conflict_graph_stream(Arc::clone(&pal), &events, k, fidelity, 5, &mut acc)
                    .unwrap();
            assert_eq!(cg.graph, build_conflict_graph_offline(&g, &pal).graph);
            assert!(acc.words_used() > 0);
        }
    }

    #[test]
    fn stream_insert_delete_everything_is_empty() {
        let (g, pal) = sample_instance(1);
        let mut events: Vec<StreamEvent> = g.edges().map(StreamEvent::insert).collect();
        events.extend(g.edges().map(StreamEvent::delete));
        let mut acc = SpaceAccountant::new();
        let cg =
            build_conflict_graph_stream(Arc::new(pal), &events, 50, Fidelity::Sketch, 0, &mut acc)
                .unwrap();
        assert_eq!(cg.graph.m(), 0);
    }

    #[test]
    fn sharing_pair_strategies_agree() {
        // dense classes pick the scan, sparse ones the class walk
        for (n, delta, k) in [(120, 10, 6), (400, 200, 2)] {
            let pal = sample_palettes_uniform(n, delta, k, 3).unwrap();
            let mut got = Vec::new();
            for_each_sharing_pair(&pal, |u, v| got.push((u, v)));
            let mut want = Vec::new();
            for u in 0..n as Vertex {
                for v in u + 1..n as Vertex {
                    if pal.list(u).iter().any(|c| pal.list(v).contains(c)) {
                        want.push((u, v));
                    }
                }
            }
            assert_eq!(got, want);
        }
    }

    #[test]
    fn json_round_trip() {
        let pal = sample_palettes_uniform(10, 6, 4, 3).unwrap();
        let text = serde_json::to_string(&pal.to_json()).unwrap();
        let file: PaletteFile = serde_json::from_str(&text).unwrap();
        let back = Palette::from_json(&file).unwrap();
        for v in 0..10 {
            assert_eq!(back.list(v), pal.list(v));
            assert_eq!(back.l1(v), pal.l1(v));
        }
    }
}
