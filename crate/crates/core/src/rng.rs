//! Portable seeded streams: SplitMix64 keyed by `(master seed, label)`.
//!
//! A stream's initial state is `mix64(master ^ fnv1a64(label))`, where `mix64`
//! is the SplitMix64 output finaliser. Bounded draws use rejection sampling
//! with threshold `2^64 mod bound`, then `x mod bound`. Every step is plain
//! 64-bit integer arithmetic, so other implementations can reproduce the
//! streams bit for bit.

use serde::{Deserialize, Serialize};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

/// SplitMix64 finaliser.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(state: u64) -> Self {
        SplitMix64 { state }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in `0..bound`; `bound` must be positive.
    #[inline]
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let x = self.next_u64();
            if x >= threshold {
                return x % bound;
            }
        }
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// First `take` entries of a uniformly shuffled `0..total`, by partial
    /// Fisher-Yates: slot `i` swaps with `i + next_below(total - i)`.
    pub fn sample_indices(&mut self, total: usize, take: usize) -> Vec<usize> {
        assert!(take <= total);
        let mut pool: Vec<usize> = (0..total).collect();
        for i in 0..take {
            let j = i + self.next_below((total - i) as u64) as usize;
            pool.swap(i, j);
        }
        pool.truncate(take);
        pool
    }

    /// Shuffles `items` in place with the same partial Fisher-Yates walk.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        let total = items.len();
        for i in 0..total {
            let j = i + self.next_below((total - i) as u64) as usize;
            items.swap(i, j);
        }
    }
}

/// A master seed plus a stream label; distinct labels give unrelated streams.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master: u64,
    pub label: String,
}

impl SeedSpec {
    pub fn new(master: u64, label: impl Into<String>) -> Self {
        SeedSpec {
            master,
            label: label.into(),
        }
    }

    pub fn stream_seed(&self) -> u64 {
        mix64(self.master ^ fnv1a64(self.label.as_bytes()))
    }

    pub fn rng(&self) -> SplitMix64 {
        SplitMix64::new(self.stream_seed())
    }

    /// Substream keyed by this stream's seed and a new label.
    pub fn child(&self, label: impl Into<String>) -> SeedSpec {
        SeedSpec::new(self.stream_seed(), label)
    }
}
