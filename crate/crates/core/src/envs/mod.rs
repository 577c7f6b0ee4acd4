//! Reward-generating environments.
//!
//! [`SyntheticEnv`] implements the linear model used by the regret
//! experiments: per round, `K` fresh Gaussian contexts normalized to unit
//! Euclidean norm; rewards `x . theta_star + noise` for a hidden unit-norm
//! parameter. The [`replay`] submodule implements the logged-data pipeline
//! (ingestion, context construction, unbiased offline evaluation).

pub mod replay;

pub use replay::{
    build_context, ingest_log, planted_log, random_baseline_ctr, replay_evaluate, IngestConfig,
    IngestStats, LinTsPolicy, LinUcbPolicy, PartialPolicy, PlantedLogConfig, RandomPolicy,
    ReplayLog, ReplayLogEntry, ReplayOutcome, ReplayPolicy,
};

use crate::bandit::{BanditError, ContextSet};
use crate::fedsim::{EnvRound, Environment};
use crate::numerics::{NumericsError, Rng, Vector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("invalid configuration: {what}")]
    InvalidConfig { what: &'static str },
    #[error("ingestion produced no rows (all malformed or filtered)")]
    EmptyIngest,
    #[error("pairing the hash values overflowed; lower hash_buckets")]
    LabelOverflow,
    #[error("replay log has no entries")]
    EmptyLog,
    #[error("no credited events: the policy never matched a logged action")]
    NoCreditedEvents,
    #[error(transparent)]
    Bandit(#[from] BanditError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("read failed: {0}")]
    Io(#[from] std::io::Error),
}

/// Default variance of the Gaussian both contexts and the reward parameter
/// are drawn from (before normalization), and of the reward noise.
pub const DEFAULT_SIGMA2: f64 = 0.05;

/// Synthetic linear environment with a hidden unit-norm parameter.
#[derive(Debug, Clone)]
pub struct SyntheticEnv {
    dim: usize,
    arms: usize,
    theta_star: Vector,
    noise_sigma2: f64,
    rng: Rng,
}

impl SyntheticEnv {
    /// Draw `theta_star ~ N(0, sigma^2 I)` normalized to unit norm; context
    /// and noise variances default to [`DEFAULT_SIGMA2`].
    pub fn new(dim: usize, arms: usize, seed: u64) -> Self {
        let mut rng = Rng::seed_from_u64(seed);
        let theta_star = draw_unit_vector(dim, DEFAULT_SIGMA2, &mut rng);
        Self {
            dim,
            arms,
            theta_star,
            noise_sigma2: DEFAULT_SIGMA2,
            rng,
        }
    }

    /// Override the reward-noise variance (0 makes rewards exact means).
    pub fn with_noise_sigma2(mut self, sigma2: f64) -> Self {
        assert!(sigma2 >= 0.0 && sigma2.is_finite());
        self.noise_sigma2 = sigma2;
        self
    }

    pub fn theta_star(&self) -> &Vector {
        &self.theta_star
    }

    /// One round: `K` fresh unit-norm contexts plus the noiseless means the
    /// regret computation needs.
    pub fn synth_round(&mut self) -> EnvRound {
        let contexts: Vec<Vector> = (0..self.arms)
            .map(|_| draw_unit_vector(self.dim, DEFAULT_SIGMA2, &mut self.rng))
            .collect();
        let noiseless_means = contexts
            .iter()
            .map(|x| x.dot(&self.theta_star).expect("dimensions fixed"))
            .collect();
        EnvRound {
            contexts: ContextSet::new(contexts).expect("at least one arm"),
            noiseless_means,
        }
    }
}

/// Gaussian draw scaled by `sqrt(sigma2)`, re-drawn in the (measure-zero)
/// event of a zero vector, then normalized.
fn draw_unit_vector(dim: usize, sigma2: f64, rng: &mut Rng) -> Vector {
    loop {
        let mut v = rng.standard_normal_vector(dim).scale(sigma2.sqrt());
        if v.normalize().is_ok() {
            return v;
        }
    }
}

impl Environment for SyntheticEnv {
    fn next_round(&mut self) -> Option<EnvRound> {
        Some(self.synth_round())
    }

    fn reward(&mut self, round: &EnvRound, arm: usize) -> f64 {
        round.noiseless_means[arm] + self.noise_sigma2.sqrt() * self.rng.standard_normal()
    }
}
