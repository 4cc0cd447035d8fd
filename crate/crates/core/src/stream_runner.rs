//! Single-pass coloring of a dynamic edge stream.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coloring::{list_color_conflict, PhaseReport, PipelineConfig};
use crate::decomposition::{
    components_to_decomposition, cut_stream_budget, dense_stream_budget, detect_dense,
    friend_sampling_rate, select_friend_set, DenseRule, FriendOracle, HssDecomposition,
    SamplingConstants, StreamEdgeCollector, StreamFriendCollector,
};
use crate::error::{invalid, Error, Result};
use crate::graph::{Color, Graph, StreamEvent};
use crate::hashing::{derive_seed, hash2, ln_n};
use crate::palette::{default_k_per_vertex, Palette, PaletteSpec, StreamConflictCollector};
use crate::sketch::{Fidelity, SampleMode, SpaceAccountant};
use crate::SCHEMA_VERSION;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamRunConfig {
    pub n: usize,
    /// Declared bound on the final maximum degree. `None` runs an extra
    /// pass with exact degree counters first.
    pub delta: Option<usize>,
    pub palette: PaletteSpec,
    /// Decomposition parameter; samplers use `δ = eps/10`.
    pub eps: f64,
    /// Conflict-sampler size; defaults to `min(4K², Δ)`.
    pub k_per_vertex: Option<usize>,
    pub consts: SamplingConstants,
    pub fidelity: Fidelity,
    pub seed: u64,
    pub max_attempts: usize,
    pub pipeline: PipelineConfig,
}

impl StreamRunConfig {
    pub fn new(n: usize, delta: usize, seed: u64) -> Self {
        StreamRunConfig {
            n,
            delta: Some(delta),
            palette: PaletteSpec::default(),
            eps: 1.0 / 6.0,
            k_per_vertex: None,
            consts: SamplingConstants::default(),
            fidelity: Fidelity::Ideal,
            seed,
            max_attempts: 3,
            pipeline: PipelineConfig::default(),
        }
    }
}

/// Decomposition samplers. When every budget covers the whole edge set the
/// three collectors would all recover it, so one exhaustive collector stands
/// in for them.
#[allow(clippy::large_enum_variant)]
enum DecompositionSamplers {
    Separate {
        friend: StreamFriendCollector,
        dense: StreamEdgeCollector,
        cut: StreamEdgeCollector,
    },
    Shared {
        all: StreamEdgeCollector,
        rate: f64,
        friend_seed: u64,
    },
}

impl DecompositionSamplers {
    fn process(&mut self, event: &StreamEvent) {
        match self {
            DecompositionSamplers::Separate { friend, dense, cut } => {
                friend.process(event);
                dense.process(event);
                cut.process(event);
            }
            DecompositionSamplers::Shared { all, .. } => all.process(event),
        }
    }
}

/// Every structure one pass needs, allocated before the first event.
pub struct StreamPass {
    n: usize,
    delta: usize,
    eps: f64,
    dp: f64,
    accountant: SpaceAccountant,
    degrees: Vec<i64>,
    consumed: usize,
    conflict: Option<StreamConflictCollector>,
    samplers: Option<DecompositionSamplers>,
}

pub struct PassOutput {
    pub conflict: Graph,
    pub decomposition: HssDecomposition,
    pub accountant: SpaceAccountant,
    pub events_consumed: usize,
    pub final_edges: usize,
}

impl StreamPass {
    pub fn new(
        config: &StreamRunConfig,
        delta: usize,
        palette: Arc<Palette>,
        sampler_seed: u64,
    ) -> Result<Self> {
        let n = config.n;
        if palette.n() != n {
            return Err(invalid("palette size does not match n"));
        }
        let dp = config.eps / 10.0;
        let mut acc = SpaceAccountant::new();
        acc.charge("degree_counters", n as u64);
        acc.charge("palettes", palette.total_size() as u64 + n as u64);
        let conflict = if delta >= 1 {
            let k = config
                .k_per_vertex
                .unwrap_or_else(|| default_k_per_vertex(&palette).min(delta));
            Some(StreamConflictCollector::new(
                Arc::clone(&palette),
                k,
                Some(delta as u64),
                config.fidelity,
                derive_seed(sampler_seed, "conflict"),
                &mut acc,
            )?)
        } else {
            None
        };
        let samplers = if delta >= 2 {
            let cap = (n as f64) * delta as f64 / 2.0;
            let dense_budget = dense_stream_budget(n, dp, &config.consts);
            let cut_budget = cut_stream_budget(n, dp, &config.consts);
            let rate = friend_sampling_rate(n, delta, dp, &config.consts);
            let friend_seed = derive_seed(sampler_seed, "friend");
            Some(if dense_budget >= cap && cut_budget >= cap && rate >= 1.0 {
                DecompositionSamplers::Shared {
                    all: StreamEdgeCollector::new(
                        n,
                        delta,
                        dense_budget,
                        SampleMode::WithoutReplacement,
                        config.fidelity,
                        derive_seed(sampler_seed, "edges"),
                        "edge_samplers",
                        &mut acc,
                    )?,
                    rate,
                    friend_seed,
                }
            } else {
                DecompositionSamplers::Separate {
                    friend: StreamFriendCollector::new(
                        n,
                        delta,
                        dp,
                        &config.consts,
                        config.fidelity,
                        friend_seed,
                        &mut acc,
                    )?,
                    dense: StreamEdgeCollector::new(
                        n,
                        delta,
                        dense_budget,
                        SampleMode::WithReplacement,
                        config.fidelity,
                        derive_seed(sampler_seed, "dense"),
                        "dense_samplers",
                        &mut acc,
                    )?,
                    cut: StreamEdgeCollector::new(
                        n,
                        delta,
                        cut_budget,
                        SampleMode::WithoutReplacement,
                        config.fidelity,
                        derive_seed(sampler_seed, "cut"),
                        "cut_samplers",
                        &mut acc,
                    )?,
                }
            })
        } else {
            None
        };
        Ok(StreamPass {
            n,
            delta,
            eps: config.eps,
            dp,
            accountant: acc,
            degrees: vec![0; n],
            consumed: 0,
            conflict,
            samplers,
        })
    }

    pub fn process(&mut self, event: &StreamEvent) -> Result<()> {
        let index = self.consumed;
        self.consumed += 1;
        let (u, v) = (event.edge.lo() as usize, event.edge.hi() as usize);
        if v >= self.n {
            return Err(Error::MalformedStream {
                index,
                reason: format!("vertex {v} out of range"),
            });
        }
        for w in [u, v] {
            self.degrees[w] += event.sign();
            if self.degrees[w] < 0 {
                return Err(Error::MalformedStream {
                    index,
                    reason: format!("vertex {w} has negative degree"),
                });
            }
        }
        if let Some(c) = &mut self.conflict {
            c.process(event);
        }
        if let Some(s) = &mut self.samplers {
            s.process(event);
        }
        Ok(())
    }

    pub fn events_consumed(&self) -> usize {
        self.consumed
    }

    pub fn accountant(&self) -> &SpaceAccountant {
        &self.accountant
    }

    pub fn finish(mut self) -> Result<PassOutput> {
        let observed = self.degrees.iter().copied().max().unwrap_or(0) as usize;
        if observed > self.delta {
            return Err(Error::DegreeBoundExceeded {
                declared: self.delta,
                observed,
            });
        }
        let final_edges = (self.degrees.iter().sum::<i64>() / 2) as usize;
        let conflict = match &self.conflict {
            Some(c) => c.finish()?.graph,
            None => Graph::empty(self.n),
        };
        self.accountant.charge(
            "recovered_conflict_graph",
            2 * conflict.m() as u64 + self.n as u64 + 1,
        );
        let (oracle, dense_samples, cut_samples, live) = match &self.samplers {
            None => (None, Vec::new(), Vec::new(), 0),
            Some(DecompositionSamplers::Separate { friend, dense, cut }) => (
                Some(friend.finish()?),
                dense.finish()?,
                cut.finish()?,
                dense.live_edges(),
            ),
            Some(DecompositionSamplers::Shared { all, rate, friend_seed }) => {
                let edges = all.finish()?;
                let s_set = select_friend_set(self.n, *rate, *friend_seed);
                let oracle =
                    FriendOracle::from_edges(self.n, self.delta, self.dp, *rate, s_set, &edges);
                (Some(oracle), edges.clone(), edges, all.live_edges())
            }
        };
        let decomposition = match oracle {
            Some(oracle) => {
                self.accountant.charge("recovered_friend_lists", oracle.words());
                self.accountant.charge(
                    "recovered_edge_samples",
                    2 * (dense_samples.len() + cut_samples.len()) as u64,
                );
                let rule = DenseRule::Stream {
                    dp: self.dp,
                    draws: dense_samples.len(),
                    m: live,
                };
                let dense = detect_dense(self.n, self.delta, &oracle, &dense_samples, rule);
                components_to_decomposition(self.n, self.delta, self.eps, &oracle, &dense, &cut_samples)
            }
            None => HssDecomposition::all_sparse(self.eps, self.n),
        };
        self.accountant.charge("coloring", self.n as u64);
        Ok(PassOutput {
            conflict,
            decomposition,
            accountant: self.accountant,
            events_consumed: self.consumed,
            final_edges,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamReport {
    pub schema_version: u32,
    pub n: usize,
    pub delta: usize,
    pub final_edges: usize,
    pub peak_words: u64,
    pub breakdown: BTreeMap<String, u64>,
    pub pass_count: usize,
    pub events_consumed: usize,
    pub attempts: usize,
    pub sampler_failures: Vec<String>,
    /// `peak_words / (n·ln³ n)`.
    pub log_cubed_constant: f64,
    pub conflict_edges: usize,
    pub sparse: usize,
    pub cliques: usize,
    pub pipeline: PhaseReport,
}

#[derive(Clone, Debug)]
pub struct StreamOutcome {
    pub colors: Vec<Color>,
    pub palette: Arc<Palette>,
    pub decomposition: HssDecomposition,
    pub report: StreamReport,
}

/// Words a run spends without any sampler: degree counters, palettes,
/// the recovered graph's offsets and the output.
pub fn bookkeeping_floor(n: usize) -> u64 {
    6 * n as u64 + 16
}

/// Largest final degree, from exact counters.
pub fn estimate_delta(n: usize, events: &[StreamEvent]) -> Result<usize> {
    let mut deg = vec![0i64; n];
    for (index, ev) in events.iter().enumerate() {
        for w in [ev.edge.lo() as usize, ev.edge.hi() as usize] {
            if w >= n {
                return Err(Error::MalformedStream {
                    index,
                    reason: format!("vertex {w} out of range"),
                });
            }
            deg[w] += ev.sign();
        }
    }
    Ok(deg.into_iter().max().unwrap_or(0).max(0) as usize)
}

/// Feeds `events` once to a fresh [`StreamPass`], retrying sampler failures
/// with new sampler seeds, then colors the recovered conflict graph inside
/// the lists.
pub fn run_stream(events: &[StreamEvent], config: &StreamRunConfig) -> Result<StreamOutcome> {
    let n = config.n;
    let (delta, pass_count) = match config.delta {
        Some(d) => (d, 1),
        None => (estimate_delta(n, events)?, 2),
    };
    let palette = Arc::new(config.palette.sample(n, delta, derive_seed(config.seed, "palette"))?);
    let sampler_seed = derive_seed(config.seed, "samplers");
    let mut failures = Vec::new();
    let mut output = None;
    for attempt in 0..config.max_attempts.max(1) {
        let mut pass = StreamPass::new(config, delta, Arc::clone(&palette), hash2(sampler_seed, attempt as u64))?;
        for ev in events {
            pass.process(ev)?;
        }
        match pass.finish() {
            Ok(out) => {
                output = Some(out);
                break;
            }
            Err(Error::RecoveryFailure(msg)) => failures.push(msg),
            Err(e) => return Err(e),
        }
    }
    let Some(mut out) = output else {
        return Err(Error::RecoveryFailure(failures.join("; ")));
    };
    let attempts = failures.len() + 1;
    if pass_count == 2 {
        out.accountant.charge("degree_estimate", n as u64);
    }
    let pipeline = PipelineConfig {
        strict_list: true,
        ..config.pipeline
    };
    let result = list_color_conflict(&out.conflict, None, &out.decomposition, &palette, &pipeline)?;
    let peak = out.accountant.words_used();
    let l = ln_n(n);
    let report = StreamReport {
        schema_version: SCHEMA_VERSION,
        n,
        delta,
        final_edges: out.final_edges,
        peak_words: peak,
        breakdown: out.accountant.breakdown().clone(),
        pass_count,
        events_consumed: out.events_consumed,
        attempts,
        sampler_failures: failures,
        log_cubed_constant: peak as f64 / (n.max(1) as f64 * l * l * l),
        conflict_edges: out.conflict.m(),
        sparse: out.decomposition.sparse.len(),
        cliques: out.decomposition.cliques.len(),
        pipeline: result.report.clone(),
    };
    Ok(StreamOutcome {
        colors: result.colors(),
        palette,
        decomposition: out.decomposition,
        report,
    })
}
