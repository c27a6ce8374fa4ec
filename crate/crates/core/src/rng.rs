//! Deterministic counter-based randomness.
//!
//! Every draw is a pure function of (seed, stream tags, counter), so any
//! round of any replica can be reproduced in isolation and results never
//! depend on scheduling or worker count. Not cryptographic.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Keyed counter RNG. `derive` forks an independent stream, `u64_at`
/// reads the stream at an arbitrary counter position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self {
            key: mix(seed ^ GOLDEN),
        }
    }

    /// Fork an independent stream identified by `tag`.
    pub fn derive(&self, tag: u64) -> Self {
        Self {
            key: mix(self.key ^ mix(tag)),
        }
    }

    pub fn u64_at(&self, counter: u64) -> u64 {
        mix(self.key ^ counter.wrapping_mul(GOLDEN))
    }

    /// Uniform draw in [0, 1) at the given counter position.
    pub fn f64_at(&self, counter: u64) -> f64 {
        to_unit(self.u64_at(counter))
    }

    /// Sequential view of this stream starting at counter 0.
    pub fn stream(&self) -> StreamRng {
        StreamRng {
            base: *self,
            counter: 0,
        }
    }
}

#[inline]
fn to_unit(u: u64) -> f64 {
    (u >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Sequential RNG over a counter stream.
#[derive(Clone, Debug)]
pub struct StreamRng {
    base: CounterRng,
    counter: u64,
}

impl StreamRng {
    pub fn new(seed: u64) -> Self {
        CounterRng::new(seed).stream()
    }

    pub fn next_u64(&mut self) -> u64 {
        let v = self.base.u64_at(self.counter);
        self.counter += 1;
        v
    }

    pub fn next_f64(&mut self) -> f64 {
        to_unit(self.next_u64())
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        let u = self.next_f64();
        ((u * n as f64) as usize).min(n - 1)
    }
}

/// Sample an index from a probability vector given a uniform draw.
/// Falls back to the last index on accumulated rounding slack.
pub fn sample_index(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p.max(0.0);
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Uniform choice among the entries of `items`.
pub fn choose_uniform<T: Copy>(items: &[T], u: f64) -> T {
    items[((u * items.len() as f64) as usize).min(items.len() - 1)]
}
