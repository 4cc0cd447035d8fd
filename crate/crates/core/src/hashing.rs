//! Deterministic hashing and seed derivation.
//!
//! Everything random in the crate is a function of a master seed. Per-vertex
//! and per-edge decisions use hashes so that independent components (stream
//! collectors, MPC machines) reach the same choices without sharing state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
pub fn hash2(seed: u64, x: u64) -> u64 {
    mix64(seed ^ mix64(x))
}

/// Uniform value in [0, 1) from the top 53 bits of a hash.
#[inline]
pub fn unit(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Bernoulli(rate) decision keyed by `(seed, x)`.
#[inline]
pub fn coin(seed: u64, x: u64, rate: f64) -> bool {
    rate >= 1.0 || unit(hash2(seed, x)) < rate
}

/// Sub-seed for a named component.
pub fn derive_seed(master: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    hash2(master, h)
}

pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Natural log clamped so tiny graphs still get positive sampling rates.
#[inline]
pub fn ln_n(n: usize) -> f64 {
    (n.max(2) as f64).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derive_seed_separates_labels() {
        assert_ne!(derive_seed(7, "palette"), derive_seed(7, "stream"));
        assert_eq!(derive_seed(7, "palette"), derive_seed(7, "palette"));
    }

    #[test]
    fn unit_stays_in_range() {
        for x in 0..10_000u64 {
            let u = unit(hash2(3, x));
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn coin_rate_matches() {
        let hits = (0..100_000u64).filter(|&x| coin(11, x, 0.3)).count();
        assert!((hits as f64 / 100_000.0 - 0.3).abs() < 0.01);
    }
}
