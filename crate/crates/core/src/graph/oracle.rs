use serde::{Deserialize, Serialize};

use super::{Graph, Vertex};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryCounts {
    pub degree: u64,
    pub neighbor: u64,
    pub pair: u64,
}

impl QueryCounts {
    pub fn total(&self) -> u64 {
        self.degree + self.neighbor + self.pair
    }
}

/// Adjacency-list and adjacency-matrix access to a graph, with counters.
/// Neighbors are ordered by vertex id.
#[derive(Debug)]
pub struct QueryOracle<'g> {
    graph: &'g Graph,
    counts: QueryCounts,
}

impl<'g> QueryOracle<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        QueryOracle {
            graph,
            counts: QueryCounts::default(),
        }
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Edge count of the hidden graph, for reports only; not a query.
    pub fn baseline_m(&self) -> usize {
        self.graph.m()
    }

    pub fn counts(&self) -> QueryCounts {
        self.counts
    }

    fn check(&self, v: Vertex) -> Result<()> {
        if (v as usize) < self.graph.n() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v as u64,
                n: self.graph.n(),
            })
        }
    }

    pub fn degree(&mut self, v: Vertex) -> Result<usize> {
        self.check(v)?;
        self.counts.degree += 1;
        Ok(self.graph.degree(v))
    }

    /// The `i`-th neighbor of `v`, 1-based.
    pub fn neighbor(&mut self, v: Vertex, i: usize) -> Result<Vertex> {
        self.check(v)?;
        let row = self.graph.neighbors(v);
        if i == 0 || i > row.len() {
            return Err(Error::NeighborIndexOutOfRange {
                vertex: v,
                index: i,
                degree: row.len(),
            });
        }
        self.counts.neighbor += 1;
        Ok(row[i - 1])
    }

    pub fn pair(&mut self, u: Vertex, v: Vertex) -> Result<bool> {
        self.check(u)?;
        self.check(v)?;
        self.counts.pair += 1;
        Ok(self.graph.has_edge(u, v))
    }
}
