//! Seeded random numbers with no platform or dependency drift.
//!
//! Every stochastic step in the crate (witness sampling, hull pivots,
//! synthetic mixtures) flows from a caller-provided `u64` seed through this
//! generator, so identical configurations reproduce identical outputs down
//! to the bit, across platforms and releases.
//!
//! The generator is xoshiro256++ seeded via SplitMix64, the usual pairing
//! recommended by the xoshiro authors.

use alloc::vec::Vec;

/// A small, fast, deterministic PRNG.
#[derive(Debug, Clone)]
pub struct Rng {
    state: [u64; 4],
    spare_normal: Option<f64>,
}

impl Rng {
    pub fn seed_from_u64(seed: u64) -> Self {
        let mut sm = seed;
        let mut next = || {
            sm = sm.wrapping_add(0x9E3779B97F4A7C15);
            let mut z = sm;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
            z ^ (z >> 31)
        };
        Rng { state: [next(), next(), next(), next()], spare_normal: None }
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.state;
        let result = s[0].wrapping_add(s[3]).rotate_left(23).wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, bound)` by rejection, bias-free.
    pub fn below(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        let bound = bound as u64;
        let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
        loop {
            let v = self.next_u64();
            if v <= zone {
                return (v % bound) as usize;
            }
        }
    }

    /// Standard normal via Box-Muller; pairs are cached.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = loop {
            let u = self.uniform();
            if u > 0.0 {
                break u;
            }
        };
        let u2 = self.uniform();
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let theta = 2.0 * core::f64::consts::PI * u2;
        self.spare_normal = Some(r * libm::sin(theta));
        r * libm::cos(theta)
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }

    /// `count` distinct indices drawn without replacement from `0..pool`,
    /// in draw order (partial Fisher-Yates).
    pub fn sample_indices(&mut self, pool: usize, count: usize) -> Vec<usize> {
        debug_assert!(count <= pool);
        let mut idx: Vec<usize> = (0..pool).collect();
        for i in 0..count {
            let j = i + self.below(pool - i);
            idx.swap(i, j);
        }
        idx.truncate(count);
        idx
    }
}
