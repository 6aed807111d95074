//! Counter-based wake streams.
//!
//! A stream is keyed by `(master_seed, entity)` and its value at step `t` is a
//! hash of the key and `t`. Any process can query any step in any order and
//! will see the same bits, which is what lets several simulations share one
//! set of wake-up times.

/// Entity index of the source.
pub const SOURCE_ENTITY: i64 = -1;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent seed from `seed` and an index.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix64(mix64(seed ^ 0x5EED_0F5E_ED00_0000).wrapping_add(index.wrapping_mul(GOLDEN)))
}

/// Wake probability as a 53-bit threshold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WakeProbability {
    p: f64,
    threshold: u64,
}

impl WakeProbability {
    /// `p` must lie in `(0, 1]`.
    pub fn new(p: f64) -> Option<WakeProbability> {
        if !(p > 0.0 && p <= 1.0) {
            return None;
        }
        Some(WakeProbability {
            p,
            threshold: (p * (1u64 << 53) as f64) as u64,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// Deterministic Bernoulli stream for one entity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WakeStream {
    key: u64,
}

impl WakeStream {
    pub fn new(master_seed: u64, entity: i64) -> WakeStream {
        WakeStream {
            key: mix64(
                mix64(master_seed).wrapping_add((entity as u64).wrapping_mul(GOLDEN)) ^ GOLDEN,
            ),
        }
    }

    /// Raw 64 bits for step `t`.
    #[inline]
    pub fn draw(&self, t: u64) -> u64 {
        mix64(self.key.wrapping_add(t.wrapping_mul(GOLDEN)))
    }

    /// Uniform value in `[0, 1)` for step `t`.
    pub fn unit(&self, t: u64) -> f64 {
        (self.draw(t) >> 11) as f64 / (1u64 << 53) as f64
    }

    #[inline]
    pub fn wakes(&self, t: u64, p: WakeProbability) -> bool {
        (self.draw(t) >> 11) < p.threshold
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repeated_queries_agree() {
        let a = WakeStream::new(42, 7);
        let b = WakeStream::new(42, 7);
        let p = WakeProbability::new(0.5).unwrap();
        assert!((0..10_000).all(|t| a.wakes(t, p) == b.wakes(t, p)));
        assert!((0..10_000).rev().all(|t| a.draw(t) == b.draw(t)));
    }

    #[test]
    fn distinct_entities_differ_early() {
        let p = WakeProbability::new(0.5).unwrap();
        let prefix = |i: i64| {
            let s = WakeStream::new(9, i);
            (1..=64).fold(0u64, |acc, t| acc << 1 | s.wakes(t, p) as u64)
        };
        let mut seen: Vec<u64> = (-1..1000).map(prefix).collect();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), 1001);
    }

    #[test]
    fn mean_within_three_sigma() {
        for &p in &[0.1, 0.5, 0.75, 0.9] {
            let s = WakeStream::new(1234, 3);
            let wp = WakeProbability::new(p).unwrap();
            let n = 100_000u64;
            let hits = (1..=n).filter(|&t| s.wakes(t, wp)).count() as f64;
            let sigma = (n as f64 * p * (1.0 - p)).sqrt();
            assert!(
                (hits - n as f64 * p).abs() <= 3.0 * sigma,
                "p={p} hits={hits}"
            );
        }
    }

    #[test]
    fn certain_wake_and_bad_probability() {
        let s = WakeStream::new(0, 0);
        let one = WakeProbability::new(1.0).unwrap();
        assert!((0..1000).all(|t| s.wakes(t, one)));
        assert!(WakeProbability::new(0.0).is_none());
        assert!(WakeProbability::new(1.5).is_none());
        assert!(WakeProbability::new(f64::NAN).is_none());
    }
}
