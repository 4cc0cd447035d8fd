use super::PartialColoring;
use crate::error::Result;
use crate::graph::{Color, Graph, Vertex};
use crate::palette::Palette;

/// Every sparse vertex proposes `proposals[v]`; it keeps the color iff no
/// neighbor proposed the same one. Vertices outside `sparse` are inert.
pub fn one_shot_color(
    graph: &Graph,
    coloring: &mut PartialColoring,
    sparse: &[Vertex],
    proposals: &[Option<Color>],
) -> Result<usize> {
    let mut active = vec![None; graph.n()];
    for &v in sparse {
        active[v as usize] = proposals[v as usize];
    }
    let winners: Vec<(Vertex, Color)> = sparse
        .iter()
        .filter_map(|&v| {
            let x = active[v as usize]?;
            let clash = graph
                .neighbors(v)
                .iter()
                .any(|&u| active[u as usize] == Some(x));
            (!clash && coloring.color(v).is_none() && coloring.is_available(v, x)).then_some((v, x))
        })
        .collect();
    for &(v, x) in &winners {
        coloring.assign(graph, v, x)?;
    }
    Ok(winners.len())
}

/// Synchronous rounds: in round `i` each uncolored sparse vertex proposes
/// `L1(v)[i]` and takes it if available and no uncolored neighbor proposed
/// the same color. A vertex stops after its list runs out. Returns the
/// uncolored sparse vertices.
pub fn greedy_color_rounds(
    graph: &Graph,
    coloring: &mut PartialColoring,
    sparse: &[Vertex],
    palette: &Palette,
    rounds: usize,
) -> Result<Vec<Vertex>> {
    let mut active: Vec<Vertex> = sparse
        .iter()
        .copied()
        .filter(|&v| coloring.color(v).is_none())
        .collect();
    let mut proposal: Vec<Option<Color>> = vec![None; graph.n()];
    for i in 1..=rounds {
        let mut any = false;
        for &v in &active {
            proposal[v as usize] = palette.l1(v).get(i).copied();
            any |= proposal[v as usize].is_some();
        }
        if !any {
            break;
        }
        let winners: Vec<(Vertex, Color)> = active
            .iter()
            .filter_map(|&v| {
                let x = proposal[v as usize]?;
                if !coloring.is_available(v, x) {
                    return None;
                }
                let clash = graph.neighbors(v).iter().any(|&u| {
                    proposal[u as usize] == Some(x) && coloring.color(u).is_none()
                });
                (!clash).then_some((v, x))
            })
            .collect();
        for &v in &active {
            proposal[v as usize] = None;
        }
        for &(v, x) in &winners {
            coloring.assign(graph, v, x)?;
        }
        active.retain(|&v| coloring.color(v).is_none());
        if active.is_empty() {
            break;
        }
    }
    Ok(active)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_one_shot(g: &Graph, xs: &[Color]) -> Vec<Option<Color>> {
        let mut pc = PartialColoring::new(g.n(), 3);
        let sparse: Vec<Vertex> = (0..g.n() as Vertex).collect();
        let props: Vec<Option<Color>> = xs.iter().map(|&c| Some(c)).collect();
        one_shot_color(g, &mut pc, &sparse, &props).unwrap();
        pc.colors().to_vec()
    }

    #[test]
    fn one_shot_rules() {
        let e = Graph::from_edges(2, [(0, 1)]).unwrap();
        assert_eq!(run_one_shot(&e, &[1, 1]), vec![None, None]);
        assert_eq!(run_one_shot(&e, &[1, 2]), vec![Some(1), Some(2)]);
        let k3 = Graph::complete(3);
        assert_eq!(run_one_shot(&k3, &[1, 2, 2]), vec![Some(1), None, None]);
    }

    #[test]
    fn dense_vertices_do_not_propose() {
        let e = Graph::from_edges(2, [(0, 1)]).unwrap();
        let mut pc = PartialColoring::new(2, 2);
        one_shot_color(&e, &mut pc, &[0], &[Some(1), Some(1)]).unwrap();
        assert_eq!(pc.colors(), &[Some(1), None]);
    }

    #[test]
    fn lone_vertex_colored_in_round_one_of_greedy() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let pal = Palette::from_lists(1, vec![vec![1, 2], vec![1]]).unwrap();
        let mut pc = PartialColoring::new(2, 2);
        pc.assign(&g, 1, 1).unwrap();
        // vertex 0's first proposal (1) is blocked; L1(0)[1] = 2 succeeds
        let residual = greedy_color_rounds(&g, &mut pc, &[0], &pal, 4).unwrap();
        assert!(residual.is_empty());
        assert_eq!(pc.color(0), Some(2));
    }

    #[test]
    fn adversarial_ties_stay_residual() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let lists = vec![vec![1, 2, 3], vec![1, 2, 3]];
        let batches = lists.into_iter().map(|l| [l, vec![], vec![]]).collect();
        let pal = Palette::from_batches(2, batches, crate::palette::PaletteParams::Explicit, 0)
            .unwrap();
        let mut pc = PartialColoring::new(2, 3);
        let residual = greedy_color_rounds(&g, &mut pc, &[0, 1], &pal, 10).unwrap();
        assert_eq!(residual, vec![0, 1]);
    }
}
