//! Seeded generation of small rationals for probabilistic checks.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{ratio, RatMatrix, Rational};

/// Deterministic stream of small rationals `n/d`, `|n| <= 9`, `1 <= d <= 7`.
pub struct RationalSampler {
    rng: ChaCha8Rng,
}

impl RationalSampler {
    pub fn new(seed: u64) -> Self {
        RationalSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform in `0..n`. Panics if `n == 0`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        self.rng.next_u64() % n
    }

    pub fn rational(&mut self) -> Rational {
        let n = self.below(19) as i64 - 9;
        let d = self.below(7) as i64 + 1;
        ratio(n, d)
    }

    pub fn nonzero_rational(&mut self) -> Rational {
        loop {
            let r = self.rational();
            if r != ratio(0, 1) {
                return r;
            }
        }
    }

    /// Column vector with nonzero entries.
    pub fn point(&mut self, n: usize) -> RatMatrix {
        RatMatrix::column((0..n).map(|_| self.nonzero_rational()).collect())
    }

    pub fn unit_f64(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible() {
        let mut a = RationalSampler::new(7);
        let mut b = RationalSampler::new(7);
        let xs: Vec<Rational> = (0..20).map(|_| a.rational()).collect();
        let ys: Vec<Rational> = (0..20).map(|_| b.rational()).collect();
        assert_eq!(xs, ys);
        assert!(RationalSampler::new(1).point(6).entries().iter().all(|v| *v != ratio(0, 1)));
    }
}
