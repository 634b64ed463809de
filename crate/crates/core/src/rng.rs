//! Seeded, platform-stable randomness.
//!
//! Every random draw in the crate goes through [`SeededRandom`], a thin
//! wrapper over ChaCha8. Substreams are derived from the *seed* (not from
//! the consumed state) with SplitMix64, so a pipeline step always sees the
//! same stream regardless of how much an earlier step consumed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Single-consumer random source with named substreams.
#[derive(Debug, Clone)]
pub struct SeededRandom {
    seed: u64,
    rng: ChaCha8Rng,
}

pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a label into a seed. FNV-1a over the label, then SplitMix64.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    splitmix64(seed ^ splitmix64(h))
}

impl SeededRandom {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent stream keyed by `label`; does not advance `self`.
    pub fn substream(&self, label: &str) -> SeededRandom {
        SeededRandom::new(derive_seed(self.seed, label))
    }

    /// Independent stream keyed by `(label, index)`.
    pub fn indexed(&self, label: &str, index: u64) -> SeededRandom {
        SeededRandom::new(splitmix64(derive_seed(self.seed, label) ^ splitmix64(index)))
    }

    /// Uniform integer in `0..n`. Panics when `n == 0`.
    pub fn below(&mut self, n: u32) -> u32 {
        assert!(n > 0, "empty range");
        self.rng.random_range(0..n)
    }

    pub fn index(&mut self, len: usize) -> usize {
        self.below(u32::try_from(len).expect("range too large")) as usize
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.index(items.len())]
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.random()
    }

    /// Bernoulli draw with probability `p`, quantised to 2^-32.
    pub fn chance(&mut self, p: f64) -> bool {
        let threshold = (p.clamp(0.0, 1.0) * 4_294_967_296.0) as u64;
        u64::from(self.rng.random::<u32>()) < threshold
    }

    /// `count` distinct elements drawn without replacement, in draw order.
    pub fn sample<T: Clone>(&mut self, items: &[T], count: usize) -> Vec<T> {
        let mut pool: Vec<T> = items.to_vec();
        let mut out = Vec::with_capacity(count);
        for _ in 0..count.min(pool.len()) {
            let i = self.index(pool.len());
            out.push(pool.remove(i));
        }
        out
    }
}
