//! Seeded randomness plumbing shared by every solver.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniform randomness as the solvers consume it.
///
/// All stochastic decisions flow through this trait, so tests can swap in a
/// scripted source and force any branch of an operator.
pub trait RandomSource {
    /// Uniform draw from `[0, 1)`.
    fn unit(&mut self) -> f64;
    /// Uniform integer from `[0, n)`.
    fn index(&mut self, n: usize) -> usize;
    /// Uniform draw from `[lo, hi]`.
    fn range(&mut self, lo: f64, hi: f64) -> f64;
}

/// Stream-cipher generator: the same seed always yields the same draw
/// sequence, on every platform.
#[derive(Clone, Debug)]
pub struct SeededRng(ChaCha8Rng);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }
}

impl RandomSource for SeededRng {
    fn unit(&mut self) -> f64 {
        self.0.random()
    }

    fn index(&mut self, n: usize) -> usize {
        self.0.random_range(0..n)
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        self.0.random_range(lo..=hi)
    }
}
