use serde::{Deserialize, Serialize};

use super::PartialColoring;
use crate::error::{Error, Result};
use crate::graph::{Color, Graph, Vertex};
use crate::palette::Palette;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FallbackReport {
    pub from_list: usize,
    pub recolored: usize,
    pub off_list: usize,
    pub failed: Vec<Vertex>,
}

impl FallbackReport {
    pub fn list_compliant(&self) -> bool {
        self.off_list == 0
    }
}

/// Colors `residual` vertices in three steps:
/// 1. greedily from `L(v)` in decreasing degree order;
/// 2. by moving the single neighbor that blocks some `c ∈ L(v)` to another
///    color of its own list;
/// 3. unless `strict`, with any free color of `[Δ+1]` checked against `full`.
///
/// `graph` is the graph availability is tracked on. The last step needs the
/// real input graph and is skipped when `full` is `None`.
pub fn fallback_color(
    graph: &Graph,
    coloring: &mut PartialColoring,
    palette: &Palette,
    residual: &[Vertex],
    strict: bool,
    full: Option<&Graph>,
) -> Result<FallbackReport> {
    let mut report = FallbackReport::default();
    let mut order: Vec<Vertex> = residual
        .iter()
        .copied()
        .filter(|&v| coloring.color(v).is_none())
        .collect();
    order.sort_unstable_by(|&a, &b| graph.degree(b).cmp(&graph.degree(a)).then(a.cmp(&b)));
    order.dedup();

    let mut left = Vec::new();
    for &v in &order {
        match palette.list(v).iter().copied().find(|&c| coloring.is_available(v, c)) {
            Some(c) => {
                coloring.assign(graph, v, c)?;
                report.from_list += 1;
            }
            None => left.push(v),
        }
    }

    let mut still = Vec::new();
    for &v in &left {
        if recolor_one(graph, coloring, palette, v)? {
            report.recolored += 1;
        } else {
            still.push(v);
        }
    }

    if !still.is_empty() {
        match full.filter(|_| !strict) {
            Some(full) => {
                for &v in &still {
                    let c = (1..=coloring.palette_size() as Color).find(|&c| {
                        coloring.is_available(v, c)
                            && full
                                .neighbors(v)
                                .iter()
                                .all(|&u| coloring.color(u) != Some(c))
                    });
                    match c {
                        Some(c) => {
                            coloring.assign(graph, v, c)?;
                            report.off_list += 1;
                        }
                        None => report.failed.push(v),
                    }
                }
            }
            None => report.failed = still,
        }
    }
    if !report.failed.is_empty() && (strict || full.is_none()) {
        return Err(Error::ListColoringFailed {
            residual: report.failed.len(),
        });
    }
    Ok(report)
}

fn recolor_one(
    graph: &Graph,
    coloring: &mut PartialColoring,
    palette: &Palette,
    v: Vertex,
) -> Result<bool> {
    for &c in palette.list(v) {
        let blockers = coloring.blockers(graph, v, c);
        let [u] = blockers[..] else { continue };
        let alt = palette
            .list(u)
            .iter()
            .copied()
            .find(|&c2| c2 != c && coloring.is_available(u, c2));
        if let Some(c2) = alt {
            coloring.unassign(graph, u);
            coloring.assign(graph, u, c2)?;
            coloring.assign(graph, v, c)?;
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_fails_on_identical_singletons() {
        let g = Graph::complete(3);
        let pal = Palette::from_lists(2, vec![vec![1]; 3]).unwrap();
        let mut pc = PartialColoring::new(3, 3);
        let err = fallback_color(&g, &mut pc, &pal, &[0, 1, 2], true, Some(&g)).unwrap_err();
        assert!(matches!(err, Error::ListColoringFailed { residual: 2 }));

        let mut pc = PartialColoring::new(3, 3);
        let rep = fallback_color(&g, &mut pc, &pal, &[0, 1, 2], false, Some(&g)).unwrap();
        assert_eq!(rep.from_list, 1);
        assert_eq!(rep.off_list, 2);
        assert!(!rep.list_compliant());
        assert!(pc.is_proper(&g));
        assert_eq!(pc.colored_count(), 3);
    }

    #[test]
    fn single_blocker_is_moved() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let pal = Palette::from_lists(1, vec![vec![1], vec![1, 2]]).unwrap();
        let mut pc = PartialColoring::new(2, 2);
        pc.assign(&g, 1, 1).unwrap();
        let rep = fallback_color(&g, &mut pc, &pal, &[0], true, None).unwrap();
        assert_eq!(rep.recolored, 1);
        assert_eq!(pc.colors(), &[Some(1), Some(2)]);
    }
}
