//! Simple undirected graphs in CSR form, edge-list IO, generators, the
//! adjacency query oracle and dynamic edge streams.

pub mod generate;
mod oracle;
mod stream;

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generate::{generate, GeneratorSpec, GraphModel};
pub use oracle::{QueryCounts, QueryOracle};
pub use stream::{
    read_stream, replay, to_stream, write_stream, EventKind, StreamEvent, StreamHeader,
};

pub type Vertex = u32;
/// Colors are 1-based: a (Δ+1) palette is `1..=Δ+1`.
pub type Color = u32;

/// Undirected edge stored with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge(Vertex, Vertex);

impl Edge {
    /// Panics on a self-loop.
    pub fn new(a: Vertex, b: Vertex) -> Self {
        Self::try_new(a, b).expect("self-loop")
    }

    pub fn try_new(a: Vertex, b: Vertex) -> Option<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Edge(a, b)),
            std::cmp::Ordering::Greater => Some(Edge(b, a)),
            std::cmp::Ordering::Equal => None,
        }
    }

    #[inline]
    pub fn lo(self) -> Vertex {
        self.0
    }

    #[inline]
    pub fn hi(self) -> Vertex {
        self.1
    }

    #[inline]
    pub fn other(self, v: Vertex) -> Vertex {
        if v == self.0 {
            self.1
        } else {
            self.0
        }
    }

    #[inline]
    pub fn touches(self, v: Vertex) -> bool {
        self.0 == v || self.1 == v
    }

    /// Dense key `lo * n + hi`.
    #[inline]
    pub fn key(self, n: usize) -> u64 {
        self.0 as u64 * n as u64 + self.1 as u64
    }

    #[inline]
    pub fn from_key(key: u64, n: usize) -> Option<Self> {
        let n = n as u64;
        if n == 0 {
            return None;
        }
        let (a, b) = (key / n, key % n);
        if a < b && b < n {
            Some(Edge(a as Vertex, b as Vertex))
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    offsets: Vec<usize>,
    targets: Vec<Vertex>,
    max_degree: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            offsets: vec![0; n + 1],
            targets: Vec::new(),
            max_degree: 0,
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 0..n as Vertex {
            for v in u + 1..n as Vertex {
                edges.push(Edge(u, v));
            }
        }
        Self::from_sorted_unique(n, &edges)
    }

    /// Builds a graph from endpoint pairs. Self-loops, duplicates and
    /// out-of-range endpoints are errors.
    pub fn from_edges<I>(n: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut edges = Vec::new();
        for (a, b) in pairs {
            for x in [a, b] {
                if x as usize >= n {
                    return Err(Error::VertexOutOfRange {
                        vertex: x as u64,
                        n,
                    });
                }
            }
            let e = Edge::try_new(a, b)
                .ok_or_else(|| Error::MalformedGraph(format!("self-loop at {a}")))?;
            edges.push(e);
        }
        Self::from_edge_vec(n, edges)
    }

    pub fn from_edge_vec(n: usize, mut edges: Vec<Edge>) -> Result<Self> {
        if let Some(e) = edges.iter().find(|e| e.hi() as usize >= n) {
            return Err(Error::VertexOutOfRange {
                vertex: e.hi() as u64,
                n,
            });
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::MalformedGraph(format!(
                "duplicate edge ({}, {})",
                w[0].lo(),
                w[0].hi()
            )));
        }
        Ok(Self::from_sorted_unique(n, &edges))
    }

    /// Same as [`Graph::from_edge_vec`] but silently drops duplicates.
    pub fn from_edges_dedup(n: usize, mut edges: Vec<Edge>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        Self::from_sorted_unique(n, &edges)
    }

    fn from_sorted_unique(n: usize, edges: &[Edge]) -> Self {
        let mut deg = vec![0usize; n];
        for e in edges {
            deg[e.0 as usize] += 1;
            deg[e.1 as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &deg {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut targets = vec![0; offsets[n]];
        // lexicographic edge order fills every row in ascending order
        for e in edges {
            targets[cursor[e.0 as usize]] = e.1;
            cursor[e.0 as usize] += 1;
            targets[cursor[e.1 as usize]] = e.0;
            cursor[e.1 as usize] += 1;
        }
        let max_degree = deg.iter().copied().max().unwrap_or(0);
        Graph {
            n,
            offsets,
            targets,
            max_degree,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Sorted neighbor list.
    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        if u == v {
            return false;
        }
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.neighbors(a).binary_search(&b).is_ok()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        0..self.n as Vertex
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.vertices().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| v > u)
                .map(move |&v| Edge(u, v))
        })
    }

    pub fn common_neighbors(&self, u: Vertex, v: Vertex) -> usize {
        sorted_intersection_count(self.neighbors(u), self.neighbors(v))
    }

    /// Spanning subgraph keeping the edges accepted by `keep`.
    pub fn filter_edges(&self, mut keep: impl FnMut(Edge) -> bool) -> Graph {
        let edges: Vec<Edge> = self.edges().filter(|&e| keep(e)).collect();
        Self::from_sorted_unique(self.n, &edges)
    }

    /// Disjoint union, relabelling `other` after `self`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.n as Vertex;
        let edges: Vec<Edge> = self
            .edges()
            .chain(other.edges().map(|e| Edge(e.0 + shift, e.1 + shift)))
            .collect();
        Self::from_sorted_unique(self.n + other.n, &edges)
    }

    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {}", self.n, self.m())?;
        for e in self.edges() {
            writeln!(w, "{} {}", e.0, e.1)?;
        }
        Ok(())
    }

    pub fn read_edge_list<R: BufRead>(r: R) -> Result<Graph> {
        let mut lines = r.lines().enumerate().filter_map(|(i, l)| match l {
            Ok(s) if s.trim().is_empty() || s.trim_start().starts_with('#') => None,
            other => Some((i + 1, other)),
        });
        let (line, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            reason: "missing header".into(),
        })?;
        let header = header?;
        let (n, m) = parse_pair::<usize>(&header, line)?;
        let mut edges = Vec::with_capacity(m);
        for (line, text) in lines {
            let text = text?;
            let (u, v) = parse_pair::<Vertex>(&text, line)?;
            if u >= v {
                return Err(Error::Parse {
                    line,
                    reason: format!("expected u < v, got {u} {v}"),
                });
            }
            if v as usize >= n {
                return Err(Error::VertexOutOfRange {
                    vertex: v as u64,
                    n,
                });
            }
            edges.push(Edge(u, v));
        }
        if edges.len() != m {
            return Err(Error::MalformedGraph(format!(
                "header declares {m} edges, found {}",
                edges.len()
            )));
        }
        Self::from_edge_vec(n, edges)
    }
}

fn parse_pair<T: std::str::FromStr>(text: &str, line: usize) -> Result<(T, T)> {
    let mut it = text.split_whitespace();
    let mut next = || -> Result<T> {
        it.next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse {
                line,
                reason: format!("expected two integers in {text:?}"),
            })
    };
    let a = next()?;
    let b = next()?;
    Ok((a, b))
}

pub fn sorted_intersection_count(a: &[Vertex], b: &[Vertex]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Union-find with path halving.
#[derive(Clone, Debug)]
pub struct DisjointSets {
    parent: Vec<u32>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n as u32).collect(),
        }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = p;
            x = p;
        }
        x
    }

    pub fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_normalizes() {
        assert_eq!(Edge::new(5, 2), Edge::new(2, 5));
        assert_eq!(Edge::new(5, 2).lo(), 2);
        assert!(Edge::try_new(3, 3).is_none());
        let e = Edge::new(4, 9);
        assert_eq!(Edge::from_key(e.key(10), 10), Some(e));
    }

    #[test]
    fn csr_rows_sorted() {
        let g = Graph::from_edges(5, [(4, 0), (2, 1), (0, 2), (3, 0), (1, 4)]).unwrap();
        assert_eq!(g.neighbors(0), &[2, 3, 4]);
        assert_eq!(g.neighbors(1), &[2, 4]);
        assert_eq!(g.m(), 5);
        assert_eq!(g.max_degree(), 3);
        assert!(g.has_edge(4, 1));
        assert!(!g.has_edge(3, 4));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Graph::from_edges(3, [(0, 0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 1), (1, 0)]).is_err());
        assert!(matches!(
            Graph::from_edges(3, [(0, 3)]),
            Err(Error::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::complete(6);
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("6 15\n0 1\n"));
        let h = Graph::read_edge_list(&buf[..]).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn edge_list_rejects_reversed_pair() {
        let text = "3 1\n2 1\n";
        assert!(Graph::read_edge_list(text.as_bytes()).is_err());
        let text = "3 2\n0 1\n";
        assert!(Graph::read_edge_list(text.as_bytes()).is_err());
    }

    #[test]
    fn union_find_merges() {
        let mut d = DisjointSets::new(6);
        d.union(4, 5);
        d.union(5, 2);
        assert_eq!(d.find(4), d.find(2));
        assert_ne!(d.find(0), d.find(2));
        assert_eq!(d.find(4), 2);
    }
}
