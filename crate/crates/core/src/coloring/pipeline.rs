use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{
    apply_colorful_matching, avg_complement_degree, complete_clique_coloring, fallback_color,
    find_colorful_matching, greedy_color_rounds, matching_target, one_shot_color,
    PartialColoring,
};
use crate::decomposition::HssDecomposition;
use crate::error::{invalid, Result};
use crate::graph::{Color, Graph, Vertex};
use crate::hashing::ln_n;
use crate::palette::Palette;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub strict_list: bool,
    /// Greedy rounds are `⌈round_constant · ln n⌉`.
    pub round_constant: f64,
    /// Colorful matching target is `⌈matching_multiplier · d̄⌉`.
    pub matching_multiplier: f64,
    pub matching_search_budget: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            strict_list: false,
            round_constant: 4.0,
            matching_multiplier: 4.0,
            matching_search_budget: 200_000,
        }
    }
}

impl PipelineConfig {
    pub fn rounds(&self, n: usize) -> usize {
        (self.round_constant * ln_n(n)).ceil() as usize
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub sparse: usize,
    pub cliques: usize,
    pub one_shot_colored: usize,
    pub greedy_rounds: usize,
    pub greedy_colored: usize,
    pub sparse_residual: usize,
    pub matching_target_total: usize,
    pub colorful_pairs: usize,
    pub short_cliques: usize,
    pub palette_matched: usize,
    pub clique_residual: usize,
    pub fallback_from_list: usize,
    pub fallback_recolored: usize,
    pub fallback_off_list: usize,
    pub uncolored: usize,
    pub list_compliant: bool,
    pub wall_ms: f64,
}

#[derive(Clone, Debug)]
pub struct PipelineOutcome {
    pub coloring: PartialColoring,
    pub report: PhaseReport,
}

impl PipelineOutcome {
    pub fn colors(&self) -> Vec<Color> {
        self.coloring.colors().iter().map(|c| c.unwrap_or(0)).collect()
    }
}

/// Runs every phase against `graph` itself.
pub fn list_color_pipeline(
    graph: &Graph,
    decomposition: &HssDecomposition,
    palette: &Palette,
    config: &PipelineConfig,
) -> Result<PipelineOutcome> {
    list_color_conflict(graph, Some(graph), decomposition, palette, config)
}

/// Runs every phase against `coloring_graph`, usually the conflict graph.
/// `full` is the input graph when it is available; without it the run is
/// forced to stay inside the lists.
pub fn list_color_conflict(
    coloring_graph: &Graph,
    full: Option<&Graph>,
    decomposition: &HssDecomposition,
    palette: &Palette,
    config: &PipelineConfig,
) -> Result<PipelineOutcome> {
    let start = Instant::now();
    let n = coloring_graph.n();
    if palette.n() != n {
        return Err(invalid(format!("palette has {} lists for {n} vertices", palette.n())));
    }
    let g = coloring_graph;
    let mut pc = PartialColoring::new(n, palette.colors());
    let mut rep = PhaseReport {
        sparse: decomposition.sparse.len(),
        cliques: decomposition.cliques.len(),
        ..Default::default()
    };

    let proposals: Vec<Option<Color>> =
        (0..n as Vertex).map(|v| palette.l1(v).first().copied()).collect();
    rep.one_shot_colored = one_shot_color(g, &mut pc, &decomposition.sparse, &proposals)?;
    rep.greedy_rounds = config.rounds(n);
    let sparse_residual =
        greedy_color_rounds(g, &mut pc, &decomposition.sparse, palette, rep.greedy_rounds)?;
    rep.greedy_colored = decomposition.sparse.len() - sparse_residual.len() - rep.one_shot_colored;
    rep.sparse_residual = sparse_residual.len();
    debug_assert!(pc.is_proper(g));

    for clique in &decomposition.cliques {
        let target = matching_target(avg_complement_degree(g, clique), config.matching_multiplier);
        let m = find_colorful_matching(g, clique, palette, &pc, target, config.matching_search_budget);
        apply_colorful_matching(g, &mut pc, &m)?;
        rep.matching_target_total += target;
        rep.colorful_pairs += m.triples.len();
        rep.short_cliques += m.short as usize;
    }
    debug_assert!(pc.is_proper(g));

    let mut residual = sparse_residual;
    for clique in &decomposition.cliques {
        let before = pc.colored_count();
        let left = complete_clique_coloring(g, clique, palette, &mut pc)?;
        rep.palette_matched += pc.colored_count() - before;
        rep.clique_residual += left.len();
        residual.extend(left);
    }
    debug_assert!(pc.is_proper(g));

    let fb = fallback_color(g, &mut pc, palette, &residual, config.strict_list, full)?;
    rep.fallback_from_list = fb.from_list;
    rep.fallback_recolored = fb.recolored;
    rep.fallback_off_list = fb.off_list;
    rep.uncolored = n - pc.colored_count();
    rep.list_compliant = fb.list_compliant();
    rep.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(PipelineOutcome {
        coloring: pc,
        report: rep,
    })
}
