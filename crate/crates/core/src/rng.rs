//! Seeded random streams.
//!
//! [`RngStream`] wraps xoshiro256++ seeded from a 64-bit value. Substreams are
//! derived from the *seed* alone (never from the current position), so
//! `stream.substream(i)` yields the same sequence no matter how many draws
//! the parent has already made. Datasets use one substream per example and
//! the pipeline one per stage.
//!
//! All samplers below are written against the raw `u64` output so the draw
//! sequence only depends on xoshiro256++ and this file.

use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::math;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    inner: Xoshiro256PlusPlus,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream {
            seed,
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent child stream number `index`.
    pub fn substream(&self, index: u64) -> RngStream {
        let child = mix64(self.seed ^ mix64(index.wrapping_add(1).wrapping_mul(GOLDEN)));
        RngStream::new(child)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 bits of precision.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[a, b)`. One draw. `a == b` returns `a`.
    pub fn uniform(&mut self, a: f64, b: f64) -> f64 {
        let u = self.unit();
        a + (b - a) * u
    }

    /// Standard normal via Box–Muller (cosine branch only). Two draws.
    pub fn standard_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.unit();
        let u2 = self.unit();
        math::sqrt(-2.0 * math::ln(u1)) * math::cos(2.0 * core::f64::consts::PI * u2)
    }

    /// `Normal(mean, std²)`. Two draws.
    pub fn normal(&mut self, mean: f64, std: f64) -> f64 {
        mean + std * self.standard_normal()
    }

    /// Uniform integer on the inclusive range `[lo, hi]`. Rejection
    /// sampling, so the number of raw draws is at least one.
    pub fn int_inclusive(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi, "empty integer range [{lo}, {hi}]");
        let span = (hi as i128 - lo as i128 + 1) as u128;
        if span > u64::MAX as u128 {
            return self.next_u64() as i64;
        }
        let span = span as u64;
        // largest multiple of span that fits in u64
        let zone = u64::MAX - (u64::MAX - span + 1) % span;
        loop {
            let v = self.next_u64();
            if v <= zone {
                return lo + (v % span) as i64;
            }
        }
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "index() over an empty range");
        self.int_inclusive(0, n as i64 - 1) as usize
    }

    /// `true` with probability `p`. One draw.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    /// `k` distinct indices from `0..n` in draw order (partial Fisher–Yates).
    pub fn choose_distinct(&mut self, n: usize, k: usize) -> alloc::vec::Vec<usize> {
        assert!(k <= n, "cannot choose {k} of {n}");
        let mut pool: alloc::vec::Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.index(n - i);
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }

    /// In-place Fisher–Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }
}
