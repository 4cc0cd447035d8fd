//! List coloring from sampled palettes: one-shot and greedy rounds for
//! sparse vertices, colorful matchings and palette-graph matchings for
//! almost-cliques, and a fallback for whatever remains.

mod colorful;
mod fallback;
mod matching;
mod pipeline;
mod sparse;

use crate::error::{Error, Result};
use crate::graph::{Color, Graph, Vertex};

pub use colorful::{
    apply_colorful_matching, avg_complement_degree, find_colorful_matching, matching_target,
    ColorfulMatching,
};
pub use fallback::{fallback_color, FallbackReport};
pub use matching::{
    build_palette_graph, complete_clique_coloring, hopcroft_karp, PaletteGraph,
};
pub use pipeline::{
    list_color_conflict, list_color_pipeline, PhaseReport, PipelineConfig, PipelineOutcome,
};
pub use sparse::{greedy_color_rounds, one_shot_color};

/// Partial assignment with per-vertex counts of neighbors holding each color.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialColoring {
    colors: Vec<Option<Color>>,
    palette: usize,
    forbidden: Vec<u32>,
}

impl PartialColoring {
    pub fn new(n: usize, palette_size: usize) -> Self {
        PartialColoring {
            colors: vec![None; n],
            palette: palette_size,
            forbidden: vec![0; n * palette_size],
        }
    }

    pub fn n(&self) -> usize {
        self.colors.len()
    }

    pub fn palette_size(&self) -> usize {
        self.palette
    }

    #[inline]
    pub fn color(&self, v: Vertex) -> Option<Color> {
        self.colors[v as usize]
    }

    pub fn colors(&self) -> &[Option<Color>] {
        &self.colors
    }

    #[inline]
    pub fn is_available(&self, v: Vertex, c: Color) -> bool {
        c >= 1
            && (c as usize) <= self.palette
            && self.forbidden[v as usize * self.palette + c as usize - 1] == 0
    }

    pub fn available(&self, v: Vertex) -> impl Iterator<Item = Color> + '_ {
        (1..=self.palette as Color).filter(move |&c| self.is_available(v, c))
    }

    pub fn assign(&mut self, graph: &Graph, v: Vertex, c: Color) -> Result<()> {
        if self.colors[v as usize].is_some() {
            return Err(Error::ProperViolation(format!("vertex {v} already colored")));
        }
        if !self.is_available(v, c) {
            return Err(Error::ProperViolation(format!("color {c} unavailable to vertex {v}")));
        }
        self.colors[v as usize] = Some(c);
        for &u in graph.neighbors(v) {
            self.forbidden[u as usize * self.palette + c as usize - 1] += 1;
        }
        Ok(())
    }

    pub fn unassign(&mut self, graph: &Graph, v: Vertex) -> Option<Color> {
        let c = self.colors[v as usize].take()?;
        for &u in graph.neighbors(v) {
            self.forbidden[u as usize * self.palette + c as usize - 1] -= 1;
        }
        Some(c)
    }

    pub fn uncolored(&self) -> Vec<Vertex> {
        (0..self.n() as Vertex)
            .filter(|&v| self.colors[v as usize].is_none())
            .collect()
    }

    pub fn colored_count(&self) -> usize {
        self.colors.iter().filter(|c| c.is_some()).count()
    }

    /// Neighbors of `v` currently colored `c`.
    pub fn blockers(&self, graph: &Graph, v: Vertex, c: Color) -> Vec<Vertex> {
        graph
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| self.colors[u as usize] == Some(c))
            .collect()
    }

    pub fn is_proper(&self, graph: &Graph) -> bool {
        graph.edges().all(|e| {
            let (a, b) = (self.colors[e.lo() as usize], self.colors[e.hi() as usize]);
            a.is_none() || a != b
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn availability_tracks_neighbors() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let mut pc = PartialColoring::new(3, 3);
        pc.assign(&g, 0, 2).unwrap();
        assert!(!pc.is_available(1, 2));
        assert!(pc.is_available(2, 2));
        assert!(pc.assign(&g, 1, 2).is_err());
        assert!(pc.assign(&g, 0, 1).is_err());
        assert!(pc.assign(&g, 1, 4).is_err());
        pc.assign(&g, 1, 1).unwrap();
        assert_eq!(pc.blockers(&g, 2, 1), vec![1]);
        assert_eq!(pc.unassign(&g, 0), Some(2));
        assert!(pc.is_available(1, 2));
        assert!(pc.is_proper(&g));
        assert_eq!(pc.uncolored(), vec![0, 2]);
    }
}
