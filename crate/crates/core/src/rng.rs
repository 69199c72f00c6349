//! Seeded random stream.
//!
//! Seed `s` drives a ChaCha8 stream (`ChaCha8Rng::seed_from_u64(s)`). Uniforms in
//! `(0, 1]` are `((x >> 11) + 1) * 2^-53` for the raw 64-bit output `x`; all
//! distributions are obtained by inverse transform from these uniforms, so
//! results depend on nothing but the seed.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic random stream.
#[derive(Clone, Debug)]
pub struct Stream(ChaCha8Rng);

impl Stream {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform on `(0, 1]`.
    pub fn uniform(&mut self) -> f64 {
        ((self.0.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform0(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[lo, hi]`.
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        let span = (hi - lo) as u64 + 1;
        lo + (self.0.next_u64() % span) as i64
    }

    /// Number of failures before the first success when each trial fails with
    /// probability `exp(ln_fail)`: `P[K >= k] = exp(k ln_fail)`.
    pub fn geometric_failures(&mut self, ln_fail: f64) -> u64 {
        if ln_fail == f64::NEG_INFINITY {
            return 0;
        }
        if ln_fail >= 0.0 {
            return u64::MAX;
        }
        (self.uniform().ln() / ln_fail).floor() as u64
    }

    /// Standard normal by Box-Muller.
    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform0();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible() {
        let a: Vec<u64> = (0..5).map({
            let mut s = Stream::new(7);
            move |_| s.next_u64()
        }).collect();
        let mut s = Stream::new(7);
        let b: Vec<u64> = (0..5).map(|_| s.next_u64()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn uniform_range() {
        let mut s = Stream::new(1);
        for _ in 0..10_000 {
            let u = s.uniform();
            assert!(u > 0.0 && u <= 1.0);
        }
    }

    #[test]
    fn geometric_mean() {
        let mut s = Stream::new(3);
        let q: f64 = 0.3;
        let n = 200_000;
        let mean = (0..n).map(|_| s.geometric_failures(q.ln()) as f64).sum::<f64>() / n as f64;
        let exact = q / (1.0 - q);
        assert!((mean - exact).abs() < 0.01, "{mean} vs {exact}");
        assert_eq!(s.geometric_failures(f64::NEG_INFINITY), 0);
    }
}
