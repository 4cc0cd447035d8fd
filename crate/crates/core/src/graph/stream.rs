use rustc_hash::FxHashSet;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::generate::random_pair;
use super::{Edge, Graph, Vertex};
use crate::error::{invalid, Error, Result};
use crate::hashing::rng_from;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Insert,
    Delete,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamEvent {
    pub kind: EventKind,
    pub edge: Edge,
}

impl StreamEvent {
    pub fn insert(e: Edge) -> Self {
        StreamEvent {
            kind: EventKind::Insert,
            edge: e,
        }
    }

    pub fn delete(e: Edge) -> Self {
        StreamEvent {
            kind: EventKind::Delete,
            edge: e,
        }
    }

    #[inline]
    pub fn sign(&self) -> i64 {
        match self.kind {
            EventKind::Insert => 1,
            EventKind::Delete => -1,
        }
    }
}

/// Turns a graph into a dynamic stream. `churn_ratio * m` distinct pairs
/// (any pairs, graph edges included) are inserted and later deleted; every
/// pair's own events alternate insert/delete, and all events are shuffled
/// uniformly subject to that order.
pub fn to_stream(graph: &Graph, churn_ratio: f64, seed: u64) -> Result<Vec<StreamEvent>> {
    if !(0.0..=1.0).contains(&churn_ratio) {
        return Err(invalid(format!("churn ratio {churn_ratio} outside [0, 1]")));
    }
    let n = graph.n();
    let extra = (churn_ratio * graph.m() as f64).round() as usize;
    let all_pairs = n * n.saturating_sub(1) / 2;
    if extra > all_pairs {
        return Err(invalid("churn exceeds the number of vertex pairs"));
    }
    let mut rng = rng_from(seed);
    let mut churn: Vec<Edge> = Vec::with_capacity(extra);
    if extra > 0 {
        if extra * 2 > all_pairs {
            let mut pool: Vec<Edge> = Graph::complete(n).edges().collect();
            pool.shuffle(&mut rng);
            pool.truncate(extra);
            churn = pool;
        } else {
            let mut seen = FxHashSet::with_capacity_and_hasher(extra, Default::default());
            while churn.len() < extra {
                let e = random_pair(&mut rng, n);
                if seen.insert(e) {
                    churn.push(e);
                }
            }
        }
    }
    // one token per event; each pair's tokens become insert, delete, insert, ... in order
    let mut tokens: Vec<(Edge, bool)> = Vec::with_capacity(graph.m() + 2 * extra);
    for e in graph.edges() {
        tokens.push((e, true));
    }
    for &e in &churn {
        tokens.push((e, false));
        tokens.push((e, false));
    }
    tokens.shuffle(&mut rng);
    let mut present: FxHashSet<Edge> = FxHashSet::default();
    let mut events = Vec::with_capacity(tokens.len());
    for (e, _) in tokens {
        let ev = if present.remove(&e) {
            StreamEvent::delete(e)
        } else {
            present.insert(e);
            StreamEvent::insert(e)
        };
        events.push(ev);
    }
    Ok(events)
}

/// Reference accumulator: applies the events and returns the final graph.
pub fn replay(n: usize, events: &[StreamEvent]) -> Result<Graph> {
    let mut present: FxHashSet<Edge> = FxHashSet::default();
    for (index, ev) in events.iter().enumerate() {
        if ev.edge.hi() as usize >= n {
            return Err(Error::MalformedStream {
                index,
                reason: format!("vertex {} out of range", ev.edge.hi()),
            });
        }
        let ok = match ev.kind {
            EventKind::Insert => present.insert(ev.edge),
            EventKind::Delete => present.remove(&ev.edge),
        };
        if !ok {
            let reason = match ev.kind {
                EventKind::Insert => "insert of a present edge",
                EventKind::Delete => "delete of an absent edge",
            };
            return Err(Error::MalformedStream {
                index,
                reason: reason.into(),
            });
        }
    }
    Graph::from_edge_vec(n, present.into_iter().collect())
}

/// Optional `# n=<n> delta=<d>` header carried by stream files.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StreamHeader {
    pub n: Option<usize>,
    pub delta: Option<usize>,
}

pub fn write_stream<W: Write>(mut w: W, header: StreamHeader, events: &[StreamEvent]) -> Result<()> {
    let mut tags = Vec::new();
    if let Some(n) = header.n {
        tags.push(format!("n={n}"));
    }
    if let Some(d) = header.delta {
        tags.push(format!("delta={d}"));
    }
    if !tags.is_empty() {
        writeln!(w, "# {}", tags.join(" "))?;
    }
    for ev in events {
        let sign = match ev.kind {
            EventKind::Insert => '+',
            EventKind::Delete => '-',
        };
        writeln!(w, "{sign} {} {}", ev.edge.lo(), ev.edge.hi())?;
    }
    Ok(())
}

pub fn read_stream<R: BufRead>(r: R) -> Result<(StreamHeader, Vec<StreamEvent>)> {
    let mut header = StreamHeader::default();
    let mut events = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if let Some(rest) = text.strip_prefix('#') {
            for tag in rest.split_whitespace() {
                if let Some(v) = tag.strip_prefix("n=") {
                    header.n = v.parse().ok();
                } else if let Some(v) = tag.strip_prefix("delta=") {
                    header.delta = v.parse().ok();
                }
            }
            continue;
        }
        let bad = |reason: &str| Error::Parse {
            line: i + 1,
            reason: reason.to_string(),
        };
        let mut it = text.split_whitespace();
        let kind = match it.next() {
            Some("+") => EventKind::Insert,
            Some("-") => EventKind::Delete,
            _ => return Err(bad("expected '+' or '-'")),
        };
        let mut vertex = || -> Result<Vertex> {
            it.next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| bad("expected two vertex ids"))
        };
        let (a, b) = (vertex()?, vertex()?);
        let edge = Edge::try_new(a, b).ok_or_else(|| bad("self-loop"))?;
        events.push(StreamEvent { kind, edge });
    }
    Ok((header, events))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_churn_is_inserts_only() {
        let k3 = Graph::complete(3);
        let s = to_stream(&k3, 0.0, 1).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.iter().all(|e| e.kind == EventKind::Insert));
        assert!(to_stream(&Graph::empty(5), 0.0, 1).unwrap().is_empty());
    }

    #[test]
    fn full_churn_on_triangle() {
        let k3 = Graph::complete(3);
        let s = to_stream(&k3, 1.0, 5).unwrap();
        let ins = s.iter().filter(|e| e.kind == EventKind::Insert).count();
        assert_eq!((ins, s.len() - ins), (6, 3));
        assert_eq!(replay(3, &s).unwrap(), k3);
    }

    #[test]
    fn replay_rejects_delete_before_insert() {
        let e = Edge::new(0, 1);
        let err = replay(2, &[StreamEvent::delete(e)]).unwrap_err();
        assert!(matches!(err, Error::MalformedStream { index: 0, .. }));
        assert!(replay(2, &[StreamEvent::insert(e), StreamEvent::insert(e)]).is_err());
    }

    #[test]
    fn stream_file_round_trip() {
        let g = Graph::complete(5);
        let s = to_stream(&g, 0.4, 3).unwrap();
        let mut buf = Vec::new();
        let header = StreamHeader {
            n: Some(5),
            delta: Some(4),
        };
        write_stream(&mut buf, header, &s).unwrap();
        let (h, back) = read_stream(&buf[..]).unwrap();
        assert_eq!(h, header);
        assert_eq!(back, s);
    }

    #[test]
    fn churn_out_of_range_rejected() {
        assert!(to_stream(&Graph::complete(3), 1.5, 0).is_err());
    }
}
