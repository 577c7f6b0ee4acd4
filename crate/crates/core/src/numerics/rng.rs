//! Seeded random number generation.
//!
//! The generator is ChaCha12 (`rand_chacha`), a counter-based stream cipher
//! RNG whose output is identical across platforms for a given 64-bit seed.
//! Uniform doubles take the high 53 bits of one `u64` draw, offset by half
//! an ulp so the result lies strictly inside `(0, 1)`. Standard-normal
//! deviates use the cosine branch of the Box-Muller transform: every normal
//! draw consumes exactly two uniform draws, which keeps stream accounting
//! trivial when two simulations must stay draw-for-draw aligned.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

use super::Vector;

/// Deterministic seeded RNG for every random choice in the crate.
#[derive(Debug, Clone)]
pub struct Rng {
    seed: u64,
    inner: ChaCha12Rng,
}

impl Rng {
    pub fn seed_from_u64(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    /// The seed this generator was constructed with.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in the open interval `(0, 1)`, 53-bit resolution.
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, bound)` via widening multiply.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        ((u128::from(self.next_u64()) * u128::from(bound)) >> 64) as u64
    }

    /// One standard-normal deviate (cosine Box-Muller; two uniforms).
    pub fn standard_normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Vector of `dim` independent standard-normal deviates.
    pub fn standard_normal_vector(&mut self, dim: usize) -> Vector {
        Vector::from_fn(dim, |_| self.standard_normal())
    }
}
