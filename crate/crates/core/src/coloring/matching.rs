use std::collections::VecDeque;

use super::PartialColoring;
use crate::error::Result;
use crate::graph::{Color, Graph, Vertex};
use crate::palette::Palette;

const FREE: usize = usize::MAX;

/// Maximum bipartite matching. `adj[l]` lists right vertices in `0..right`.
/// Returns the partner of every left vertex.
pub fn hopcroft_karp(adj: &[Vec<usize>], right: usize) -> Vec<Option<usize>> {
    let left = adj.len();
    let mut ml = vec![FREE; left];
    let mut mr = vec![FREE; right];
    let mut dist = vec![0usize; left];
    loop {
        let mut queue = VecDeque::new();
        for l in 0..left {
            if ml[l] == FREE {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                let m = mr[r];
                if m == FREE {
                    found = true;
                } else if dist[m] == usize::MAX {
                    dist[m] = dist[l] + 1;
                    queue.push_back(m);
                }
            }
        }
        if !found {
            break;
        }
        let mut it = vec![0usize; left];
        for l in 0..left {
            if ml[l] == FREE {
                augment(l, adj, &mut ml, &mut mr, &mut dist, &mut it);
            }
        }
    }
    ml.into_iter().map(|r| (r != FREE).then_some(r)).collect()
}

fn augment(
    l: usize,
    adj: &[Vec<usize>],
    ml: &mut [usize],
    mr: &mut [usize],
    dist: &mut [usize],
    it: &mut [usize],
) -> bool {
    while it[l] < adj[l].len() {
        let r = adj[l][it[l]];
        it[l] += 1;
        let m = mr[r];
        if m == FREE || (dist[m] == dist[l] + 1 && augment(m, adj, ml, mr, dist, it)) {
            ml[l] = r;
            mr[r] = l;
            return true;
        }
    }
    dist[l] = usize::MAX;
    false
}

/// Bipartite graph between uncolored clique vertices and their available
/// third-batch colors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaletteGraph {
    pub vertices: Vec<Vertex>,
    pub colors: Vec<Vec<Color>>,
    pub palette_size: usize,
}

impl PaletteGraph {
    pub fn edge_count(&self) -> usize {
        self.colors.iter().map(Vec::len).sum()
    }

    pub fn max_matching(&self) -> Vec<(Vertex, Color)> {
        let adj: Vec<Vec<usize>> = self
            .colors
            .iter()
            .map(|cs| cs.iter().map(|&c| c as usize - 1).collect())
            .collect();
        hopcroft_karp(&adj, self.palette_size)
            .into_iter()
            .zip(&self.vertices)
            .filter_map(|(r, &v)| r.map(|r| (v, r as Color + 1)))
            .collect()
    }
}

pub fn build_palette_graph(
    clique: &[Vertex],
    palette: &Palette,
    coloring: &PartialColoring,
) -> PaletteGraph {
    let vertices: Vec<Vertex> = clique
        .iter()
        .copied()
        .filter(|&v| coloring.color(v).is_none())
        .collect();
    let colors = vertices
        .iter()
        .map(|&v| {
            let mut cs: Vec<Color> = palette
                .l3(v)
                .iter()
                .copied()
                .filter(|&c| coloring.is_available(v, c))
                .collect();
            cs.sort_unstable();
            cs.dedup();
            cs
        })
        .collect();
    PaletteGraph {
        vertices,
        colors,
        palette_size: coloring.palette_size(),
    }
}

/// Colors the uncolored part of a clique through a maximum matching of its
/// palette graph. Returns the vertices left unmatched.
pub fn complete_clique_coloring(
    graph: &Graph,
    clique: &[Vertex],
    palette: &Palette,
    coloring: &mut PartialColoring,
) -> Result<Vec<Vertex>> {
    let pg = build_palette_graph(clique, palette, coloring);
    let matched = pg.max_matching();
    for &(v, c) in &matched {
        coloring.assign(graph, v, c)?;
    }
    Ok(pg
        .vertices
        .iter()
        .copied()
        .filter(|&v| coloring.color(v).is_none())
        .collect())
}
