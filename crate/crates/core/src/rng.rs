//! Reproducible random number generation.
//!
//! Every random decision in the pipeline (split shuffles, weight init, epoch
//! order, augmentation draws) goes through [`AugmentRng`], a xoshiro256**
//! generator whose 256-bit state is seeded by expanding a `u64` with
//! SplitMix64. Both algorithms are fixed here so that any reimplementation
//! reproduces the same draw sequence bit for bit:
//!
//! ```text
//! splitmix64(x):  x += 0x9E3779B97F4A7C15
//!                 z = x
//!                 z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!                 z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!                 return z ^ (z >> 31)
//!
//! next():         result = rotl(s1 * 5, 7) * 9
//!                 t = s1 << 17
//!                 s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3
//!                 s2 ^= t; s3 = rotl(s3, 45)
//! ```
//!
//! `next_f64` takes the top 53 bits of `next()` scaled by 2^-53, so it lies in
//! `[0, 1)`. `below(n)` uses rejection sampling on `next()` to stay unbiased.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN_GAMMA);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seeded xoshiro256** generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentRng {
    seed: u64,
    state: [u64; 4],
}

impl AugmentRng {
    pub fn new(seed: u64) -> Self {
        let mut sm = seed;
        let state = [
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
        ];
        Self { seed, state }
    }

    /// Independent generator for parallel or per-purpose use.
    ///
    /// Stream `k` of seed `s` is seeded with `splitmix64` applied to
    /// `s ^ (k * GOLDEN_GAMMA)`, so distinct streams never share a state.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut sm = seed ^ stream.wrapping_mul(GOLDEN_GAMMA);
        let mixed = splitmix64(&mut sm);
        let mut rng = Self::new(mixed);
        rng.seed = seed;
        rng
    }

    /// Rebuild a generator from a state captured by [`AugmentRng::state`].
    pub fn from_state(seed: u64, state: [u64; 4]) -> Self {
        Self { seed, state }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn state(&self) -> [u64; 4] {
        self.state
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.state;
        let result = s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi]` for `lo <= hi`; returns `lo` when they coincide.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `[0, n)`. Panics if `n == 0`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    /// Uniform integer in the closed range `[lo, hi]`.
    pub fn range_inclusive(&mut self, lo: usize, hi: usize) -> usize {
        assert!(lo <= hi);
        lo + self.below((hi - lo) as u64 + 1) as usize
    }

    /// Fisher-Yates shuffle, walking from the last element down.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// Standard normal draw (Box-Muller, one value per two uniforms).
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}
