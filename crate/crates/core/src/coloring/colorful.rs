use std::collections::HashMap;

use super::PartialColoring;
use crate::error::{Error, Result};
use crate::graph::{Color, Graph, Vertex};
use crate::palette::Palette;

/// Vertex-disjoint non-edges inside a clique, each with a distinct shared color.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ColorfulMatching {
    pub triples: Vec<(Vertex, Vertex, Color)>,
    pub target: usize,
    pub short: bool,
}

/// Average number of non-neighbors inside `clique`.
pub fn avg_complement_degree(graph: &Graph, clique: &[Vertex]) -> f64 {
    if clique.is_empty() {
        return 0.0;
    }
    let k = clique.len();
    let inside: usize = clique
        .iter()
        .map(|&v| {
            graph
                .neighbors(v)
                .iter()
                .filter(|u| clique.binary_search(u).is_ok())
                .count()
        })
        .sum();
    (k * (k - 1) - inside) as f64 / k as f64
}

pub fn matching_target(avg_complement: f64, multiplier: f64) -> usize {
    (multiplier * avg_complement - 1e-9).ceil().max(0.0) as usize
}

#[inline]
fn in_l2(palette: &Palette, v: Vertex, c: Color) -> bool {
    palette.l2(v).contains(&c)
}

/// Greedy scan over colors in increasing order taking the first
/// lexicographic non-edge; if that falls short of `target`, a bounded
/// exhaustive search tries to reach `min(target, optimum)`.
pub fn find_colorful_matching(
    graph: &Graph,
    clique: &[Vertex],
    palette: &Palette,
    coloring: &PartialColoring,
    target: usize,
    search_budget: usize,
) -> ColorfulMatching {
    let mut members: Vec<Vertex> = clique
        .iter()
        .copied()
        .filter(|&v| coloring.color(v).is_none())
        .collect();
    members.sort_unstable();
    if target == 0 {
        return ColorfulMatching {
            triples: Vec::new(),
            target,
            short: false,
        };
    }
    let mut colors: Vec<Color> = members.iter().flat_map(|&v| palette.l2(v).iter().copied()).collect();
    colors.sort_unstable();
    colors.dedup();

    let mut used = vec![false; members.len()];
    let mut triples = Vec::new();
    'colors: for &c in &colors {
        if triples.len() >= target {
            break;
        }
        let idx: Vec<usize> = (0..members.len())
            .filter(|&i| {
                !used[i] && in_l2(palette, members[i], c) && coloring.is_available(members[i], c)
            })
            .collect();
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                if !graph.has_edge(members[i], members[j]) {
                    used[i] = true;
                    used[j] = true;
                    triples.push((members[i], members[j], c));
                    continue 'colors;
                }
            }
        }
    }

    if triples.len() < target {
        if let Some(better) = exact_search(graph, &members, palette, coloring, target, search_budget) {
            if better.len() > triples.len() {
                triples = better;
            }
        }
    }
    let short = triples.len() < target;
    ColorfulMatching {
        triples,
        target,
        short,
    }
}

struct Search {
    edges: Vec<(usize, usize, Vec<Color>)>,
    target: usize,
    budget: usize,
    nodes: usize,
    used: Vec<bool>,
    chosen: Vec<usize>,
    edge_color: HashMap<usize, Color>,
    color_owner: HashMap<Color, usize>,
    best: Vec<(usize, Color)>,
}

impl Search {
    fn augment(&mut self, e: usize, seen: &mut Vec<Color>) -> bool {
        for k in 0..self.edges[e].2.len() {
            let c = self.edges[e].2[k];
            if seen.contains(&c) {
                continue;
            }
            seen.push(c);
            let owner = self.color_owner.get(&c).copied();
            if owner.is_none() || self.augment(owner.unwrap(), seen) {
                self.edge_color.insert(e, c);
                self.color_owner.insert(c, e);
                return true;
            }
        }
        false
    }

    fn run(&mut self, from: usize) {
        if self.best.len() >= self.target || self.nodes >= self.budget {
            return;
        }
        self.nodes += 1;
        if self.chosen.len() > self.best.len() {
            self.best = self
                .chosen
                .iter()
                .map(|&e| (e, self.edge_color[&e]))
                .collect();
            if self.best.len() >= self.target {
                return;
            }
        }
        for e in from..self.edges.len() {
            if self.chosen.len() + (self.edges.len() - e) <= self.best.len() {
                break;
            }
            let (a, b) = (self.edges[e].0, self.edges[e].1);
            if self.used[a] || self.used[b] {
                continue;
            }
            let saved = (self.edge_color.clone(), self.color_owner.clone());
            if self.augment(e, &mut Vec::new()) {
                self.used[a] = true;
                self.used[b] = true;
                self.chosen.push(e);
                self.run(e + 1);
                self.chosen.pop();
                self.used[a] = false;
                self.used[b] = false;
            }
            (self.edge_color, self.color_owner) = saved;
            if self.best.len() >= self.target || self.nodes >= self.budget {
                return;
            }
        }
    }
}

fn exact_search(
    graph: &Graph,
    members: &[Vertex],
    palette: &Palette,
    coloring: &PartialColoring,
    target: usize,
    budget: usize,
) -> Option<Vec<(Vertex, Vertex, Color)>> {
    let mut edges = Vec::new();
    for (i, &u) in members.iter().enumerate() {
        for (j, &v) in members.iter().enumerate().skip(i + 1) {
            if graph.has_edge(u, v) {
                continue;
            }
            let shared: Vec<Color> = palette
                .l2(u)
                .iter()
                .copied()
                .filter(|&c| {
                    in_l2(palette, v, c) && coloring.is_available(u, c) && coloring.is_available(v, c)
                })
                .collect();
            if !shared.is_empty() {
                edges.push((i, j, shared));
            }
        }
    }
    if edges.is_empty() {
        return None;
    }
    let mut s = Search {
        edges,
        target,
        budget,
        nodes: 0,
        used: vec![false; members.len()],
        chosen: Vec::new(),
        edge_color: HashMap::new(),
        color_owner: HashMap::new(),
        best: Vec::new(),
    };
    s.run(0);
    let mut out: Vec<(Vertex, Vertex, Color)> = s
        .best
        .iter()
        .map(|&(e, c)| (members[s.edges[e].0], members[s.edges[e].1], c))
        .collect();
    out.sort_unstable_by_key(|t| t.2);
    Some(out)
}

/// Colors both endpoints of every triple.
pub fn apply_colorful_matching(
    graph: &Graph,
    coloring: &mut PartialColoring,
    matching: &ColorfulMatching,
) -> Result<()> {
    for &(u, v, c) in &matching.triples {
        if graph.has_edge(u, v) {
            return Err(Error::ProperViolation(format!(
                "colorful pair ({u}, {v}) is an edge"
            )));
        }
        coloring.assign(graph, u, c)?;
        coloring.assign(graph, v, c)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::palette::PaletteParams;

    fn l2_palette(delta: usize, l2: Vec<Vec<Color>>) -> Palette {
        let batches = l2.into_iter().map(|l| [vec![], l, vec![]]).collect();
        Palette::from_batches(delta, batches, PaletteParams::Explicit, 0).unwrap()
    }

    #[test]
    fn four_clique_minus_edge() {
        let g = Graph::complete(4).filter_edges(|e| e.lo() != 0 || e.hi() != 1);
        let clique = [0, 1, 2, 3];
        let d = avg_complement_degree(&g, &clique);
        assert!((d - 0.5).abs() < 1e-12);
        let target = matching_target(d, 4.0);
        assert_eq!(target, 2);
        let pal = l2_palette(3, vec![vec![2]; 4]);
        let pc = PartialColoring::new(4, 4);
        let m = find_colorful_matching(&g, &clique, &pal, &pc, target, 10_000);
        assert_eq!(m.triples, vec![(0, 1, 2)]);
        assert!(m.short);
        let mut pc = pc;
        apply_colorful_matching(&g, &mut pc, &m).unwrap();
        assert_eq!(pc.color(0), Some(2));
        assert_eq!(pc.color(1), Some(2));
    }

    #[test]
    fn apply_rejects_edges() {
        let g = Graph::complete(2);
        let mut pc = PartialColoring::new(2, 2);
        let m = ColorfulMatching {
            triples: vec![(0, 1, 1)],
            target: 1,
            short: false,
        };
        assert!(apply_colorful_matching(&g, &mut pc, &m).is_err());
    }

    #[test]
    fn exact_completion_beats_greedy() {
        // greedy takes (0,1) on color 1 and then nothing fits;
        // the optimum pairs (0,2) on 1 and (1,3) on 2
        let g = Graph::from_edges(4, [(0, 3), (1, 2), (2, 3)]).unwrap();
        let pal = l2_palette(3, vec![vec![1], vec![1, 2], vec![1], vec![2]]);
        let pc = PartialColoring::new(4, 4);
        let m = find_colorful_matching(&g, &[0, 1, 2, 3], &pal, &pc, 2, 10_000);
        assert_eq!(m.triples.len(), 2);
        assert!(!m.short);
    }
}
