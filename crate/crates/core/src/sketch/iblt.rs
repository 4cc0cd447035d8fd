//! Invertible counting table over `u64` keys, decoded by peeling.

use crate::hashing::{hash2, mix64};

const HASHES: usize = 4;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub(crate) struct Cell {
    count: i64,
    key_sum: u64,
    fingerprint: u64,
}

impl Cell {
    #[inline]
    fn add(&mut self, key: u64, delta: i64, check: u64) {
        self.count += delta;
        self.key_sum = self.key_sum.wrapping_add(key.wrapping_mul(delta as u64));
        self.fingerprint = self.fingerprint.wrapping_add(check.wrapping_mul(delta as u64));
    }

    fn is_zero(&self) -> bool {
        self.count == 0 && self.key_sum == 0 && self.fingerprint == 0
    }
}

/// Hash layout shared by every table of one sampler: `HASHES` disjoint
/// partitions of `part` cells each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Layout {
    pub part: usize,
    pub seeds: [u64; HASHES],
    pub check_seed: u64,
}

impl Layout {
    pub fn new(part: usize, seed: u64) -> Self {
        Layout {
            part,
            seeds: std::array::from_fn(|i| hash2(seed, i as u64 + 1)),
            check_seed: hash2(seed, 0),
        }
    }

    /// Cell of `key` in partition `i`; `mixed` is `mix64(key)`.
    #[inline]
    fn slot(&self, i: usize, mixed: u64) -> usize {
        let h = mix64(self.seeds[i] ^ mixed);
        i * self.part + ((h as u128 * self.part as u128) >> 64) as usize
    }

    /// Per-key checksum; linear in the multiplicity, so deletions cancel.
    #[inline]
    pub fn check(&self, key: u64) -> u64 {
        hash2(self.check_seed, key)
    }

    pub fn cells(&self) -> usize {
        HASHES * self.part
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Table {
    cells: Vec<Cell>,
}

impl Table {
    pub fn new(layout: &Layout) -> Self {
        Table {
            cells: vec![Cell::default(); layout.cells()],
        }
    }

    #[inline]
    pub fn update(&mut self, layout: &Layout, key: u64, delta: i64, check: u64) {
        let mixed = mix64(key);
        for i in 0..HASHES {
            self.cells[layout.slot(i, mixed)].add(key, delta, check);
        }
    }

    /// Lists every key with multiplicity one, or `None` if peeling stalls.
    pub fn decode(&self, layout: &Layout) -> Option<Vec<u64>> {
        let mut cells = self.cells.clone();
        let pure = |c: &Cell| c.count == 1 && c.fingerprint == layout.check(c.key_sum);
        let mut stack: Vec<usize> = (0..cells.len()).filter(|&i| pure(&cells[i])).collect();
        let mut keys = Vec::new();
        while let Some(i) = stack.pop() {
            if !pure(&cells[i]) {
                continue;
            }
            let key = cells[i].key_sum;
            let check = layout.check(key);
            keys.push(key);
            if keys.len() > cells.len() {
                return None;
            }
            let mixed = mix64(key);
            for j in 0..HASHES {
                let s = layout.slot(j, mixed);
                cells[s].add(key, -1, check);
                if pure(&cells[s]) {
                    stack.push(s);
                }
            }
        }
        cells.iter().all(Cell::is_zero).then_some(keys)
    }
}
