use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Word-level space ledger. Structures are charged once when allocated and
/// never released, so the total is also the peak.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceAccountant {
    breakdown: BTreeMap<String, u64>,
}

impl SpaceAccountant {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn charge(&mut self, label: &str, words: u64) {
        *self.breakdown.entry(label.to_string()).or_insert(0) += words;
    }

    pub fn words_used(&self) -> u64 {
        self.breakdown.values().sum()
    }

    pub fn breakdown(&self) -> &BTreeMap<String, u64> {
        &self.breakdown
    }

    pub fn words_for(&self, label: &str) -> u64 {
        self.breakdown.get(label).copied().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_is_sum_and_monotone() {
        let mut acc = SpaceAccountant::new();
        acc.charge("palette", 10);
        let before = acc.words_used();
        acc.charge("sketch", 5);
        acc.charge("palette", 1);
        assert!(acc.words_used() >= before);
        assert_eq!(acc.words_used(), 16);
        assert_eq!(acc.words_for("palette"), 11);
    }
}
