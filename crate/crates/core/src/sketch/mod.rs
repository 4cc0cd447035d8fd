//! ℓ0 samplers over a declared pair universe.
//!
//! `Ideal` samplers keep the exact live support and are charged the
//! closed-form `k·log³ n` words. `Sketch` samplers are linear: a stack of
//! nested subsampling levels, each an invertible counting table sized for
//! `k` keys, with a fingerprint test for pure cells.

mod iblt;
mod space;

use std::collections::HashSet;

use rustc_hash::FxHashMap;
use std::fmt;
use std::sync::Arc;

use rand::seq::index;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::graph::{Edge, StreamEvent, Vertex};
use crate::hashing::{hash2, rng_from};
use iblt::{Layout, Table};

pub use space::SpaceAccountant;

pub type PairFilter = Arc<dyn Fn(Edge) -> bool + Send + Sync>;

/// The candidate set `P` a sampler listens to; events outside are ignored.
#[derive(Clone)]
pub enum Universe {
    Explicit { n: usize, pairs: Arc<HashSet<Edge>> },
    AllPairs { n: usize },
    Incident { center: Vertex, n: usize },
    Filtered { n: usize, size: u64, filter: PairFilter },
}

impl fmt::Debug for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Universe::Explicit { n, pairs } => write!(f, "Explicit(n={n}, |P|={})", pairs.len()),
            Universe::AllPairs { n } => write!(f, "AllPairs(n={n})"),
            Universe::Incident { center, n } => write!(f, "Incident({center}, n={n})"),
            Universe::Filtered { n, size, .. } => write!(f, "Filtered(n={n}, |P|={size})"),
        }
    }
}

impl Universe {
    pub fn explicit(n: usize, pairs: impl IntoIterator<Item = Edge>) -> Self {
        Universe::Explicit {
            n,
            pairs: Arc::new(pairs.into_iter().collect()),
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            Universe::Explicit { n, .. }
            | Universe::AllPairs { n }
            | Universe::Incident { n, .. }
            | Universe::Filtered { n, .. } => n,
        }
    }

    pub fn size(&self) -> u64 {
        match self {
            Universe::Explicit { pairs, .. } => pairs.len() as u64,
            Universe::AllPairs { n } => *n as u64 * (*n as u64).saturating_sub(1) / 2,
            Universe::Incident { n, .. } => (*n as u64).saturating_sub(1),
            Universe::Filtered { size, .. } => *size,
        }
    }

    #[inline]
    pub fn contains(&self, e: Edge) -> bool {
        match self {
            Universe::Explicit { pairs, .. } => pairs.contains(&e),
            Universe::AllPairs { n } => (e.hi() as usize) < *n,
            Universe::Incident { center, n } => e.touches(*center) && (e.hi() as usize) < *n,
            Universe::Filtered { n, filter, .. } => (e.hi() as usize) < *n && filter(e),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleMode {
    WithReplacement,
    WithoutReplacement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fidelity {
    Ideal,
    Sketch,
}

#[derive(Clone, Copy, Debug)]
pub struct SamplerConfig {
    pub k: usize,
    pub mode: SampleMode,
    pub fidelity: Fidelity,
    pub seed: u64,
    /// Promise that the live support never exceeds this at recovery time.
    pub support_bound: Option<u64>,
}

impl SamplerConfig {
    pub fn new(k: usize, mode: SampleMode, fidelity: Fidelity, seed: u64) -> Self {
        SamplerConfig {
            k,
            mode,
            fidelity,
            seed,
            support_bound: None,
        }
    }

    pub fn with_support_bound(mut self, bound: u64) -> Self {
        self.support_bound = Some(bound);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct SketchCopy {
    layout: Layout,
    level_seed: u64,
    levels: Vec<Table>,
}

impl SketchCopy {
    fn new(part: usize, levels: usize, seed: u64) -> Self {
        let layout = Layout::new(part, seed);
        let levels = (0..levels).map(|_| Table::new(&layout)).collect();
        SketchCopy {
            layout,
            level_seed: hash2(seed, 5),
            levels,
        }
    }

    #[inline]
    fn update(&mut self, key: u64, delta: i64) {
        let check = self.layout.check(key);
        let top = self.levels.len() - 1;
        let depth = (hash2(self.level_seed, key).trailing_zeros() as usize).min(top);
        for table in &mut self.levels[..=depth] {
            table.update(&self.layout, key, delta, check);
        }
    }

    /// Lowest level that decodes, with its keys.
    fn lowest_decodable(&self) -> Option<(usize, Vec<u64>)> {
        self.levels
            .iter()
            .enumerate()
            .find_map(|(j, t)| t.decode(&self.layout).map(|keys| (j, keys)))
    }

    fn words(&self) -> u64 {
        (self.levels.len() * self.layout.cells() * 3 + 4) as u64
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum State {
    Ideal(FxHashMap<Edge, i64>),
    Sketch(Vec<SketchCopy>),
}

#[derive(Clone, Debug)]
pub struct L0Sampler {
    universe: Universe,
    config: SamplerConfig,
    k_eff: usize,
    state: State,
}

fn ceil_log2(x: u64) -> usize {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros() as usize
    }
}

const MIN_PART: usize = 16;

/// Cells per hash partition for a table expected to hold `k` keys.
fn part_for(k: usize) -> usize {
    (k + k.div_ceil(4)).max(MIN_PART)
}

impl L0Sampler {
    pub fn new(universe: Universe, config: SamplerConfig) -> Result<Self> {
        if config.k == 0 {
            return Err(invalid("sampler needs k >= 1"));
        }
        let size = universe.size();
        if size == 0 {
            return Err(invalid("sampler universe is empty"));
        }
        let cap = config.support_bound.map_or(size, |b| b.min(size));
        let k_eff = (config.k as u64).min(cap) as usize;
        let multi_level = (k_eff as u64) < cap;
        let levels = if multi_level { ceil_log2(size) + 2 } else { 1 };
        let state = match config.fidelity {
            Fidelity::Ideal => State::Ideal(FxHashMap::default()),
            Fidelity::Sketch => State::Sketch(match config.mode {
                SampleMode::WithoutReplacement => {
                    vec![SketchCopy::new(part_for(k_eff), levels, config.seed)]
                }
                SampleMode::WithReplacement => {
                    let levels = ceil_log2(cap) + 2;
                    (0..config.k)
                        .map(|i| SketchCopy::new(MIN_PART, levels, hash2(config.seed, i as u64)))
                        .collect()
                }
            }),
        };
        Ok(L0Sampler {
            universe,
            config,
            k_eff,
            state,
        })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn k(&self) -> usize {
        self.config.k
    }

    /// Requested `k` clipped to the universe size and the support bound.
    pub fn effective_k(&self) -> usize {
        self.k_eff
    }

    pub fn process(&mut self, event: &StreamEvent) {
        self.update(event.edge, event.sign());
    }

    pub fn update(&mut self, edge: Edge, delta: i64) {
        if !self.universe.contains(edge) {
            return;
        }
        match &mut self.state {
            State::Ideal(support) => {
                let entry = support.entry(edge).or_insert(0);
                *entry += delta;
                if *entry == 0 {
                    support.remove(&edge);
                }
            }
            State::Sketch(copies) => {
                let key = edge.key(self.universe.n());
                for c in copies {
                    c.update(key, delta);
                }
            }
        }
    }

    /// Declared machine words. Ideal samplers are charged `k·⌈log₂ n⌉³`.
    pub fn declared_words(&self) -> u64 {
        match &self.state {
            State::Ideal(_) => {
                let l = ceil_log2(self.universe.n() as u64).max(1) as u64;
                let k = match self.config.mode {
                    SampleMode::WithoutReplacement => self.k_eff,
                    SampleMode::WithReplacement => self.config.k,
                } as u64;
                k * l * l * l
            }
            State::Sketch(copies) => copies.iter().map(SketchCopy::words).sum(),
        }
    }

    pub fn register(&self, accountant: &mut SpaceAccountant, label: &str) {
        accountant.charge(label, self.declared_words());
    }

    pub fn state_eq(&self, other: &Self) -> bool {
        self.state == other.state
    }

    fn failure(&self, what: &str) -> Error {
        Error::RecoveryFailure(format!("{what} ({:?}, k={})", self.universe, self.config.k))
    }

    fn keys_to_edges(&self, keys: Vec<u64>) -> Result<Vec<Edge>> {
        let n = self.universe.n();
        let mut out = Vec::with_capacity(keys.len());
        for key in keys {
            match Edge::from_key(key, n) {
                Some(e) if self.universe.contains(e) => out.push(e),
                _ => return Err(self.failure("decoded key outside the universe")),
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Samples per the configured mode: `k` draws with replacement, or
    /// `min(k, support)` distinct live pairs.
    pub fn recover(&self) -> Result<Vec<Edge>> {
        let mut rng = rng_from(hash2(self.config.seed, 0x5eed));
        match (&self.state, self.config.mode) {
            (State::Ideal(support), mode) => {
                let mut live: Vec<Edge> = support.keys().copied().collect();
                live.sort_unstable();
                Ok(match mode {
                    SampleMode::WithoutReplacement => subset(live, self.config.k, &mut rng),
                    SampleMode::WithReplacement => draws(&live, self.config.k, &mut rng),
                })
            }
            (State::Sketch(copies), SampleMode::WithoutReplacement) => {
                let (level, keys) = copies[0]
                    .lowest_decodable()
                    .ok_or_else(|| self.failure("no level decodes"))?;
                let live = self.keys_to_edges(keys)?;
                if level > 0 && live.len() < self.config.k {
                    return Err(self.failure("subsampled level too sparse"));
                }
                Ok(subset(live, self.config.k, &mut rng))
            }
            (State::Sketch(copies), SampleMode::WithReplacement) => {
                let mut out = Vec::with_capacity(copies.len());
                for c in copies {
                    let (level, keys) = c
                        .lowest_decodable()
                        .ok_or_else(|| self.failure("no level decodes"))?;
                    let live = self.keys_to_edges(keys)?;
                    if live.is_empty() {
                        if level == 0 {
                            return Ok(Vec::new());
                        }
                        return Err(self.failure("subsampled level empty"));
                    }
                    out.push(live[rng.random_range(0..live.len())]);
                }
                Ok(out)
            }
        }
    }

    /// The entire live support, or a failure if it exceeds the effective `k`.
    pub fn recover_support(&self) -> Result<Vec<Edge>> {
        let live = match &self.state {
            State::Ideal(support) => {
                let mut live: Vec<Edge> = support.keys().copied().collect();
                live.sort_unstable();
                live
            }
            State::Sketch(copies) => {
                if self.config.mode == SampleMode::WithReplacement {
                    return Err(invalid("full support needs a without-replacement sampler"));
                }
                let keys = copies[0].levels[0]
                    .decode(&copies[0].layout)
                    .ok_or_else(|| self.failure("support exceeds sketch capacity"))?;
                self.keys_to_edges(keys)?
            }
        };
        if live.len() > self.k_eff {
            return Err(self.failure("support exceeds k"));
        }
        Ok(live)
    }
}

fn subset<R: Rng>(live: Vec<Edge>, k: usize, rng: &mut R) -> Vec<Edge> {
    if live.len() <= k {
        return live;
    }
    let mut picked: Vec<Edge> = index::sample(rng, live.len(), k)
        .into_iter()
        .map(|i| live[i])
        .collect();
    picked.sort_unstable();
    picked
}

fn draws<R: Rng>(live: &[Edge], k: usize, rng: &mut R) -> Vec<Edge> {
    if live.is_empty() {
        return Vec::new();
    }
    (0..k).map(|_| live[rng.random_range(0..live.len())]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wor(k: usize, fidelity: Fidelity, seed: u64) -> SamplerConfig {
        SamplerConfig::new(k, SampleMode::WithoutReplacement, fidelity, seed)
    }

    #[test]
    fn singleton_support() {
        let u = Universe::explicit(2, [Edge::new(0, 1)]);
        let mut s = L0Sampler::new(u, wor(1, Fidelity::Sketch, 3)).unwrap();
        s.process(&StreamEvent::insert(Edge::new(0, 1)));
        assert_eq!(s.recover().unwrap(), vec![Edge::new(0, 1)]);
    }

    #[test]
    fn ideal_charge_formula() {
        let s = L0Sampler::new(Universe::AllPairs { n: 10 }, wor(3, Fidelity::Ideal, 0)).unwrap();
        assert_eq!(s.declared_words(), 3 * 4 * 4 * 4);
    }

    #[test]
    fn rejects_zero_k_and_empty_universe() {
        assert!(L0Sampler::new(Universe::AllPairs { n: 10 }, wor(0, Fidelity::Ideal, 0)).is_err());
        assert!(L0Sampler::new(Universe::AllPairs { n: 1 }, wor(1, Fidelity::Ideal, 0)).is_err());
    }

    #[test]
    fn insert_then_delete_is_identity() {
        for fid in [Fidelity::Ideal, Fidelity::Sketch] {
            let mut s = L0Sampler::new(Universe::AllPairs { n: 6 }, wor(2, fid, 1)).unwrap();
            let fresh = s.clone();
            s.process(&StreamEvent::insert(Edge::new(0, 1)));
            s.process(&StreamEvent::delete(Edge::new(0, 1)));
            assert!(s.state_eq(&fresh));
            assert!(s.recover().unwrap().is_empty());
        }
    }

    #[test]
    fn small_support_returned_whole() {
        for fid in [Fidelity::Ideal, Fidelity::Sketch] {
            let mut s = L0Sampler::new(Universe::AllPairs { n: 6 }, wor(2, fid, 1)).unwrap();
            s.process(&StreamEvent::insert(Edge::new(0, 1)));
            s.process(&StreamEvent::insert(Edge::new(0, 2)));
            assert_eq!(s.recover().unwrap(), vec![Edge::new(0, 1), Edge::new(0, 2)]);
            let mut s = L0Sampler::new(Universe::AllPairs { n: 9 }, wor(10, fid, 2)).unwrap();
            for v in 1..4 {
                s.process(&StreamEvent::insert(Edge::new(0, v)));
            }
            assert_eq!(s.recover().unwrap().len(), 3);
        }
    }

    #[test]
    fn out_of_universe_events_ignored() {
        let mut s = L0Sampler::new(
            Universe::Incident { center: 2, n: 5 },
            wor(4, Fidelity::Sketch, 7),
        )
        .unwrap();
        s.process(&StreamEvent::insert(Edge::new(0, 1)));
        s.process(&StreamEvent::insert(Edge::new(2, 4)));
        assert_eq!(s.recover_support().unwrap(), vec![Edge::new(2, 4)]);
    }

    #[test]
    fn large_support_subsamples() {
        let n = 200;
        let mut s = L0Sampler::new(Universe::AllPairs { n }, wor(5, Fidelity::Sketch, 11)).unwrap();
        for v in 1..150 {
            s.process(&StreamEvent::insert(Edge::new(0, v)));
        }
        let got = s.recover().unwrap();
        assert_eq!(got.len(), 5);
        assert!(got.iter().all(|e| e.lo() == 0));
        assert!(s.recover_support().is_err());
    }

    #[test]
    fn with_replacement_draws_k() {
        for fid in [Fidelity::Ideal, Fidelity::Sketch] {
            let cfg = SamplerConfig::new(7, SampleMode::WithReplacement, fid, 4);
            let mut s = L0Sampler::new(Universe::AllPairs { n: 30 }, cfg).unwrap();
            for v in 4..20 {
                s.process(&StreamEvent::insert(Edge::new(3, v)));
            }
            let got = s.recover().unwrap();
            assert_eq!(got.len(), 7);
            assert!(got.iter().all(|e| e.touches(3)));
        }
    }

    #[test]
    fn support_bound_shrinks_sketch() {
        let big = L0Sampler::new(Universe::AllPairs { n: 500 }, wor(400, Fidelity::Sketch, 0)).unwrap();
        let bounded = L0Sampler::new(
            Universe::AllPairs { n: 500 },
            wor(400, Fidelity::Sketch, 0).with_support_bound(50),
        )
        .unwrap();
        assert_eq!(bounded.effective_k(), 50);
        assert!(bounded.declared_words() < big.declared_words());
    }
}
