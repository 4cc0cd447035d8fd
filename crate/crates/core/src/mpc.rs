//! Round-synchronous MPC simulation with per-machine word caps.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::coloring::{list_color_conflict, PhaseReport, PipelineConfig};
use crate::decomposition::{
    bernoulli_decomposition_from_graph, BernoulliPlan, HssDecomposition, SamplingConstants,
};
use crate::error::{Error, Result};
use crate::graph::{Color, Edge, Graph, Vertex};
use crate::hashing::{derive_seed, ln_n, rng_from};
use crate::palette::{Palette, PaletteSpec};
use crate::SCHEMA_VERSION;

/// Initial placement of edges on machines.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Partition {
    /// Edge `i` in lexicographic order goes to machine `i mod machines`.
    RoundRobin,
    /// Round robin after a seeded shuffle of the edge order.
    Shuffled,
    /// Machine of every edge, in lexicographic edge order.
    Explicit { owners: Vec<usize> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepOrder {
    Ascending,
    Descending,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MpcConfig {
    pub machines: usize,
    pub memory_cap: u64,
    pub public_randomness: bool,
    /// Defaults to the graph's maximum degree.
    pub delta: Option<usize>,
    pub palette: PaletteSpec,
    pub eps: f64,
    pub consts: SamplingConstants,
    pub seed: u64,
    pub pipeline: PipelineConfig,
    pub partition: Partition,
    pub order: StepOrder,
}

impl MpcConfig {
    pub fn new(machines: usize, memory_cap: u64, public_randomness: bool, seed: u64) -> Self {
        MpcConfig {
            machines,
            memory_cap,
            public_randomness,
            delta: None,
            palette: PaletteSpec::default(),
            eps: 1.0 / 6.0,
            consts: SamplingConstants::default(),
            seed,
            pipeline: PipelineConfig::default(),
            partition: Partition::Shuffled,
            order: StepOrder::Ascending,
        }
    }
}

/// `c·n·ln² n` words.
pub fn default_memory_cap(n: usize, c: f64) -> u64 {
    let l = ln_n(n);
    (c * n as f64 * l * l).ceil() as u64
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineLoad {
    pub machine: usize,
    pub in_words: u64,
    pub out_words: u64,
    pub state_words: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundLog {
    pub round: usize,
    pub machines: Vec<MachineLoad>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MpcReport {
    pub schema_version: u32,
    pub public_randomness: bool,
    pub rounds: usize,
    pub machines: usize,
    pub vertex_machines: usize,
    pub memory_cap: u64,
    pub max_in_words: u64,
    pub max_out_words: u64,
    pub max_state_words: u64,
    pub coordinator_edges: usize,
    pub log: Vec<RoundLog>,
    pub pipeline: PhaseReport,
}

#[derive(Clone, Debug)]
pub struct MpcOutcome {
    pub colors: Vec<Color>,
    pub decomposition: HssDecomposition,
    pub report: MpcReport,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Msg {
    /// Plain edges, 2 words each.
    Edges(Vec<Edge>),
    /// Edges with a flag word each.
    Flagged(Vec<Edge>),
    /// A vertex's list and its friend-set bit.
    List { v: Vertex, colors: Vec<Color>, in_s: bool },
}

impl Msg {
    fn words(&self) -> u64 {
        1 + match self {
            Msg::Edges(es) => 2 * es.len() as u64,
            Msg::Flagged(es) => 3 * es.len() as u64,
            Msg::List { colors, .. } => 2 + colors.len() as u64,
        }
    }
}

type Outbox = Vec<(usize, Msg)>;
type Inbox = Vec<(usize, Msg)>;

struct Network {
    machines: usize,
    cap: u64,
    order: StepOrder,
    log: Vec<RoundLog>,
}

impl Network {
    fn ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = (0..self.machines).collect();
        if self.order == StepOrder::Descending {
            ids.reverse();
        }
        ids
    }

    fn check(&self, machine: usize, kind: &'static str, words: u64) -> Result<()> {
        self.check_in(self.log.len() + 1, machine, kind, words)
    }

    fn check_in(&self, round: usize, machine: usize, kind: &'static str, words: u64) -> Result<()> {
        if words > self.cap {
            return Err(Error::MemoryCap {
                machine,
                round,
                kind,
                words,
                cap: self.cap,
            });
        }
        Ok(())
    }

    /// Local computation after the last barrier, charged to that round.
    fn local(&mut self, machine: usize, words: u64) -> Result<()> {
        let round = self.log.len();
        self.check_in(round, machine, "state", words)?;
        if let Some(last) = self.log.last_mut() {
            match last.machines.iter_mut().find(|l| l.machine == machine) {
                Some(l) => l.state_words = l.state_words.max(words),
                None => last.machines.push(MachineLoad {
                    machine,
                    state_words: words,
                    ..Default::default()
                }),
            }
        }
        Ok(())
    }

    /// One communication barrier. `step` runs on every machine in the
    /// configured order and returns its outbox; `state` gives the words a
    /// machine holds during the round.
    fn round(
        &mut self,
        mut step: impl FnMut(usize) -> Outbox,
        state: impl Fn(usize) -> u64,
    ) -> Result<Vec<Inbox>> {
        let mut loads: Vec<MachineLoad> = (0..self.machines)
            .map(|m| MachineLoad {
                machine: m,
                ..Default::default()
            })
            .collect();
        let mut inboxes: Vec<Inbox> = vec![Vec::new(); self.machines];
        for m in self.ids() {
            for (dest, msg) in step(m) {
                let w = msg.words();
                loads[m].out_words += w;
                loads[dest].in_words += w;
                inboxes[dest].push((m, msg));
            }
        }
        for load in &mut loads {
            load.state_words = state(load.machine);
            self.check(load.machine, "inbox", load.in_words)?;
            self.check(load.machine, "outbox", load.out_words)?;
            self.check(load.machine, "state", load.state_words)?;
        }
        for inbox in &mut inboxes {
            inbox.sort();
        }
        self.log.push(RoundLog {
            round: self.log.len() + 1,
            machines: loads
                .into_iter()
                .filter(|l| l.in_words + l.out_words + l.state_words > 0)
                .collect(),
        });
        Ok(inboxes)
    }
}

fn partition_edges(graph: &Graph, machines: usize, partition: &Partition, seed: u64) -> Result<Vec<Vec<Edge>>> {
    let mut edges: Vec<Edge> = graph.edges().collect();
    let mut parts = vec![Vec::new(); machines];
    match partition {
        Partition::RoundRobin => {
            for (i, e) in edges.into_iter().enumerate() {
                parts[i % machines].push(e);
            }
        }
        Partition::Shuffled => {
            edges.shuffle(&mut rng_from(derive_seed(seed, "partition")));
            for (i, e) in edges.into_iter().enumerate() {
                parts[i % machines].push(e);
            }
        }
        Partition::Explicit { owners } => {
            if owners.len() != edges.len() || owners.iter().any(|&o| o >= machines) {
                return Err(crate::error::invalid("explicit partition does not match the edges"));
            }
            for (e, &o) in edges.into_iter().zip(owners) {
                parts[o].push(e);
            }
        }
    }
    Ok(parts)
}

/// Which edges the coordinator needs: conflict edges plus everything the
/// sampled decomposition reads.
struct Relevance {
    plan: Option<BernoulliPlan>,
    n: usize,
}

impl Relevance {
    fn new(n: usize, delta: usize, config: &MpcConfig) -> Self {
        let plan = (delta >= 2).then(|| {
            BernoulliPlan::new(n, delta, config.eps, derive_seed(config.seed, "decomposition"), &config.consts)
        });
        Relevance { plan, n }
    }

    fn in_s(&self, v: Vertex) -> bool {
        self.plan.as_ref().is_some_and(|p| p.in_friend_set(v))
    }

    fn keep(&self, e: Edge, share: bool, s_lo: bool, s_hi: bool) -> bool {
        share
            || s_lo
            || s_hi
            || self
                .plan
                .as_ref()
                .is_some_and(|p| p.dense_sampled(self.n, e) || p.cut_sampled(self.n, e))
    }
}

fn palette_words(palette: &Palette, vertices: impl Iterator<Item = Vertex>) -> u64 {
    vertices.map(|v| palette.list(v).len() as u64).sum()
}

fn coordinate(
    n: usize,
    delta: usize,
    config: &MpcConfig,
    palette: &Palette,
    received: &[Edge],
) -> Result<(Vec<Color>, HssDecomposition, PhaseReport)> {
    let conflict = Graph::from_edges_dedup(
        n,
        received
            .iter()
            .copied()
            .filter(|e| palette.shares_color(e.lo(), e.hi()))
            .collect(),
    );
    let decomposition = bernoulli_decomposition_from_graph(
        n,
        delta,
        config.eps,
        derive_seed(config.seed, "decomposition"),
        &config.consts,
        received,
    )?;
    let pipeline = PipelineConfig {
        strict_list: true,
        ..config.pipeline
    };
    let out = list_color_conflict(&conflict, None, &decomposition, palette, &pipeline)?;
    Ok((out.colors(), decomposition, out.report))
}

/// What the coordinator would compute if it saw every edge.
pub fn mpc_reference(graph: &Graph, config: &MpcConfig) -> Result<(Vec<Color>, HssDecomposition)> {
    let n = graph.n();
    let delta = config.delta.unwrap_or_else(|| graph.max_degree());
    let palette = config.palette.sample(n, delta, derive_seed(config.seed, "palette"))?;
    let edges: Vec<Edge> = graph.edges().collect();
    let (colors, d, _) = coordinate(n, delta, config, &palette, &edges)?;
    Ok((colors, d))
}

const COORDINATOR: usize = 0;

pub fn run_mpc(graph: &Graph, config: &MpcConfig) -> Result<MpcOutcome> {
    if config.machines == 0 {
        return Err(crate::error::invalid("need at least one machine"));
    }
    let n = graph.n();
    let delta = config.delta.unwrap_or_else(|| graph.max_degree());
    let palette = config.palette.sample(n, delta, derive_seed(config.seed, "palette"))?;
    let rel = Relevance::new(n, delta, config);
    let parts = partition_edges(graph, config.machines, &config.partition, config.seed)?;
    let edge_words = |m: usize| 2 * parts.get(m).map_or(0, |p| p.len()) as u64;

    if config.public_randomness {
        let mut net = Network {
            machines: config.machines,
            cap: config.memory_cap,
            order: config.order,
            log: Vec::new(),
        };
        let lists_held = |m: usize| -> u64 {
            let vs: BTreeSet<Vertex> = parts[m].iter().flat_map(|e| [e.lo(), e.hi()]).collect();
            palette_words(&palette, vs.into_iter())
        };
        let inboxes = net.round(
            |m| {
                let keep: Vec<Edge> = parts[m]
                    .iter()
                    .copied()
                    .filter(|&e| {
                        rel.keep(e, palette.shares_color(e.lo(), e.hi()), rel.in_s(e.lo()), rel.in_s(e.hi()))
                    })
                    .collect();
                if keep.is_empty() {
                    Vec::new()
                } else {
                    vec![(COORDINATOR, Msg::Edges(keep))]
                }
            },
            |m| edge_words(m) + lists_held(m),
        )?;
        let mut received = Vec::new();
        for (_, msg) in &inboxes[COORDINATOR] {
            if let Msg::Edges(es) = msg {
                received.extend_from_slice(es);
            }
        }
        received.sort_unstable();
        let local = palette.total_size() as u64 + 2 * received.len() as u64 + edge_words(COORDINATOR);
        net.local(COORDINATOR, local)?;
        let (colors, decomposition, pipeline) = coordinate(n, delta, config, &palette, &received)?;
        return Ok(finish(config, net, 0, received.len(), colors, decomposition, pipeline));
    }

    // vertex machine of v is `machines + v`
    let base = config.machines;
    let total = base + n;
    let mut net = Network {
        machines: total,
        cap: config.memory_cap,
        order: config.order,
        log: Vec::new(),
    };

    let inbox1 = net.round(
        |m| {
            if m >= base {
                return Vec::new();
            }
            let mut out: Vec<Vec<Edge>> = vec![Vec::new(); n];
            for &e in &parts[m] {
                out[e.lo() as usize].push(e);
                out[e.hi() as usize].push(e);
            }
            out.into_iter()
                .enumerate()
                .filter(|(_, es)| !es.is_empty())
                .map(|(v, es)| (base + v, Msg::Edges(es)))
                .collect()
        },
        |m| if m < base { edge_words(m) } else { 0 },
    )?;
    let incident: Vec<Vec<Edge>> = (0..n)
        .map(|v| {
            let mut es: Vec<Edge> = inbox1[base + v]
                .iter()
                .flat_map(|(_, msg)| match msg {
                    Msg::Edges(es) => es.clone(),
                    _ => Vec::new(),
                })
                .collect();
            es.sort_unstable();
            es
        })
        .collect();
    let own_words = |v: usize| 2 * incident[v].len() as u64 + palette.list(v as Vertex).len() as u64 + 1;

    let inbox2 = net.round(
        |m| {
            if m < base {
                return Vec::new();
            }
            let v = (m - base) as Vertex;
            incident[v as usize]
                .iter()
                .map(|e| {
                    (
                        base + e.other(v) as usize,
                        Msg::List {
                            v,
                            colors: palette.list(v).to_vec(),
                            in_s: rel.in_s(v),
                        },
                    )
                })
                .collect()
        },
        |m| if m < base { edge_words(m) } else { own_words(m - base) },
    )?;
    let heard: Vec<Vec<(Vertex, Vec<Color>, bool)>> = (0..n)
        .map(|v| {
            inbox2[base + v]
                .iter()
                .filter_map(|(_, msg)| match msg {
                    Msg::List { v, colors, in_s } => Some((*v, colors.clone(), *in_s)),
                    _ => None,
                })
                .collect()
        })
        .collect();
    let heard_words = |v: usize| heard[v].iter().map(|(_, c, _)| c.len() as u64 + 2).sum::<u64>();

    let inbox3 = net.round(
        |m| {
            if m < base {
                return Vec::new();
            }
            let v = (m - base) as Vertex;
            let mine = palette.list(v);
            let flagged: Vec<Edge> = heard[v as usize]
                .iter()
                .filter(|(u, _, _)| *u > v)
                .filter(|(u, colors, s_u)| {
                    let share = colors.iter().any(|c| mine.binary_search(c).is_ok());
                    rel.keep(Edge::new(v, *u), share, rel.in_s(v), *s_u)
                })
                .map(|(u, _, _)| Edge::new(v, *u))
                .collect();
            let mut out = vec![(
                COORDINATOR,
                Msg::List {
                    v,
                    colors: mine.to_vec(),
                    in_s: rel.in_s(v),
                },
            )];
            if !flagged.is_empty() {
                out.push((COORDINATOR, Msg::Flagged(flagged)));
            }
            out
        },
        |m| {
            if m < base {
                edge_words(m)
            } else {
                own_words(m - base) + heard_words(m - base)
            }
        },
    )?;
    let mut received = Vec::new();
    let mut lists: Vec<Vec<Color>> = vec![Vec::new(); n];
    for (_, msg) in &inbox3[COORDINATOR] {
        match msg {
            Msg::Flagged(es) => received.extend_from_slice(es),
            Msg::List { v, colors, .. } => lists[*v as usize] = colors.clone(),
            Msg::Edges(_) => {}
        }
    }
    received.sort_unstable();
    let local = lists.iter().map(|l| l.len() as u64).sum::<u64>()
        + 2 * received.len() as u64
        + edge_words(COORDINATOR);
    net.local(COORDINATOR, local)?;
    debug_assert!((0..n).all(|v| lists[v] == palette.list(v as Vertex)));
    let (colors, decomposition, pipeline) = coordinate(n, delta, config, &palette, &received)?;
    Ok(finish(config, net, n, received.len(), colors, decomposition, pipeline))
}

fn finish(
    config: &MpcConfig,
    net: Network,
    vertex_machines: usize,
    coordinator_edges: usize,
    colors: Vec<Color>,
    decomposition: HssDecomposition,
    pipeline: PhaseReport,
) -> MpcOutcome {
    let all = net.log.iter().flat_map(|r| r.machines.iter());
    let max_in = all.clone().map(|l| l.in_words).max().unwrap_or(0);
    let max_out = all.clone().map(|l| l.out_words).max().unwrap_or(0);
    let max_state = all.map(|l| l.state_words).max().unwrap_or(0);
    MpcOutcome {
        colors,
        decomposition,
        report: MpcReport {
            schema_version: SCHEMA_VERSION,
            public_randomness: config.public_randomness,
            rounds: net.log.len(),
            machines: config.machines,
            vertex_machines,
            memory_cap: config.memory_cap,
            max_in_words: max_in,
            max_out_words: max_out,
            max_state_words: max_state,
            coordinator_edges,
            log: net.log,
            pipeline,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn proper(g: &Graph, c: &[Color]) -> bool {
        g.edges().all(|e| c[e.lo() as usize] != c[e.hi() as usize])
    }

    #[test]
    fn empty_graph_one_round() {
        let g = Graph::empty(6);
        let out = run_mpc(&g, &MpcConfig::new(4, 1000, true, 1)).unwrap();
        assert_eq!(out.report.rounds, 1);
        assert_eq!(out.colors, vec![1; 6]);
    }

    #[test]
    fn k3_single_machine() {
        let g = Graph::complete(3);
        for public in [true, false] {
            let out = run_mpc(&g, &MpcConfig::new(1, 1000, public, 2)).unwrap();
            assert!(proper(&g, &out.colors));
            assert_eq!(out.report.rounds, if public { 1 } else { 3 });
        }
    }

    #[test]
    fn cap_violation_names_machine() {
        let g = Graph::complete(8);
        let err = run_mpc(&g, &MpcConfig::new(2, 10, true, 1)).unwrap_err();
        assert!(matches!(err, Error::MemoryCap { round: 1, .. }));
    }

    #[test]
    fn matches_reference_and_order() {
        let g = Graph::complete(7).disjoint_union(&Graph::from_edges(5, [(0, 1), (1, 2), (3, 4)]).unwrap());
        for public in [true, false] {
            let mut cfg = MpcConfig::new(3, 10_000, public, 9);
            let a = run_mpc(&g, &cfg).unwrap();
            cfg.order = StepOrder::Descending;
            let b = run_mpc(&g, &cfg).unwrap();
            assert_eq!(a.colors, b.colors);
            assert_eq!(a.report.log, b.report.log);
            let (reference, _) = mpc_reference(&g, &cfg).unwrap();
            assert_eq!(a.colors, reference);
            assert!(proper(&g, &a.colors));
        }
    }
}
