//! Multi-participant protocol simulation.
//!
//! Runs are strictly sequential per round: passive participants mask and
//! send, the active participant aggregates, scores, selects, observes the
//! reward, and updates. The message bus is in-process but byte-accurate —
//! every transfer is recorded in a [`Ledger`]. One run is single-threaded;
//! distinct runs own their RNGs and states and may execute in parallel.

mod ledger;
mod roles;

pub use ledger::{Ledger, Message, MessageKind, Party, ELEMENT_BYTES};
pub use roles::{build_roster, pmg_party, ParticipantRole, PmgMode, RoleKind};

use crate::bandit::{
    select_arm, ts_scores, ts_scores_with_factor, ucb_scores, ArmScore, BanditError, BanditState,
    ContextSet, InverseMode, TsParams, UcbParams,
};
use crate::hashing::stream_seed;
use crate::numerics::{cholesky, random_orthogonal, Matrix, NumericsError, Rng, Vector};
use crate::o3m::{aggregate, mask_local, partition_mask, DimPartition, O3mError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FedsimError {
    #[error("algorithm {got:?} is not valid here (expected {expected})")]
    AlgorithmMismatch {
        expected: &'static str,
        got: Algorithm,
    },
    #[error("horizon, arms and dimension must all be positive")]
    DegenerateConfig,
    #[error("partition covers {partition} coordinates but the context dimension is {dim}")]
    PartitionDimMismatch { partition: usize, dim: usize },
    #[error("mask generator index {index} invalid for {participants} participants")]
    InvalidPmg { index: usize, participants: usize },
    #[error("partial ratio {ratio} outside (0, 1]")]
    PartialRatioOutOfRange { ratio: f64 },
    #[error("partial coordinate {coord} out of range for dimension {dim}")]
    PartialCoordOutOfRange { coord: usize, dim: usize },
    #[error("environment produced {got} arms, config expects {expected}")]
    EnvironmentArms { expected: usize, got: usize },
    #[error("environment produced dimension {got}, config expects {expected}")]
    EnvironmentDim { expected: usize, got: usize },
    #[error("mask override is {rows} x {cols}, config expects {dim} x {dim}")]
    MaskDimMismatch {
        rows: usize,
        cols: usize,
        dim: usize,
    },
    #[error(transparent)]
    Bandit(#[from] BanditError),
    #[error(transparent)]
    O3m(#[from] O3mError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Which decision rule a run executes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    LinUcb,
    LinTs,
    VfUcb,
    VfTs,
    PartialLinUcb,
    PartialLinTs,
}

impl Algorithm {
    pub fn is_federated(self) -> bool {
        matches!(self, Algorithm::VfUcb | Algorithm::VfTs)
    }

    pub fn is_partial(self) -> bool {
        matches!(self, Algorithm::PartialLinUcb | Algorithm::PartialLinTs)
    }

    pub fn is_thompson(self) -> bool {
        matches!(
            self,
            Algorithm::LinTs | Algorithm::VfTs | Algorithm::PartialLinTs
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::LinUcb => "linucb",
            Algorithm::LinTs => "lints",
            Algorithm::VfUcb => "vfucb",
            Algorithm::VfTs => "vfts",
            Algorithm::PartialLinUcb => "partial-linucb",
            Algorithm::PartialLinTs => "partial-lints",
        }
    }
}

/// Everything that pins down one run. `beta` is read by the UCB variants,
/// `v` by the Thompson variants, `partial_ratio`/`partial_coords` by the
/// partial baselines only.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub horizon: usize,
    pub arms: usize,
    pub dim: usize,
    pub partition: DimPartition,
    pub lambda: f64,
    pub beta: f64,
    pub v: f64,
    pub seed: u64,
    pub partial_ratio: f64,
    /// Explicit coordinate subset for partial baselines; `None` means the
    /// first `ceil(partial_ratio * dim)` coordinates.
    pub partial_coords: Option<Vec<usize>>,
    /// Couple the Thompson sampler to the centralized one by rotating the
    /// centralized covariance factor (test flag; default off).
    pub coupled_ts: bool,
    pub pmg: PmgMode,
    /// Maintain the inverse by rank-1 updates instead of re-factorizing.
    pub sherman_morrison: bool,
    /// Record per-arm scores in every round record.
    pub record_scores: bool,
    /// Record the estimator vector after every update.
    pub record_theta: bool,
}

impl RunConfig {
    /// A config with the library defaults: single-participant partition,
    /// `lambda = 1`, `beta = 0.5`, `v = 0.01`, seed 0.
    pub fn new(algorithm: Algorithm, horizon: usize, arms: usize, dim: usize) -> Self {
        Self {
            algorithm,
            horizon,
            arms,
            dim,
            partition: DimPartition::new(vec![dim.max(1)]).expect("positive dim"),
            lambda: 1.0,
            beta: 0.5,
            v: 0.01,
            seed: 0,
            partial_ratio: 1.0,
            partial_coords: None,
            coupled_ts: false,
            pmg: PmgMode::ThirdParty,
            sherman_morrison: false,
            record_scores: false,
            record_theta: false,
        }
    }

    pub fn with_partition(mut self, partition: DimPartition) -> Self {
        self.partition = partition;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<(), FedsimError> {
        if self.horizon == 0 || self.arms == 0 || self.dim == 0 {
            return Err(FedsimError::DegenerateConfig);
        }
        if self.algorithm.is_federated() && self.partition.total_dim() != self.dim {
            return Err(FedsimError::PartitionDimMismatch {
                partition: self.partition.total_dim(),
                dim: self.dim,
            });
        }
        if self.algorithm.is_partial() {
            if !(self.partial_ratio > 0.0 && self.partial_ratio <= 1.0) {
                return Err(FedsimError::PartialRatioOutOfRange {
                    ratio: self.partial_ratio,
                });
            }
            if let Some(coords) = &self.partial_coords {
                for &c in coords {
                    if c >= self.dim {
                        return Err(FedsimError::PartialCoordOutOfRange {
                            coord: c,
                            dim: self.dim,
                        });
                    }
                }
                if coords.is_empty() {
                    return Err(FedsimError::DegenerateConfig);
                }
            }
        }
        Ok(())
    }

    fn state(&self) -> Result<BanditState, FedsimError> {
        self.state_with_dim(self.dim)
    }

    fn state_with_dim(&self, dim: usize) -> Result<BanditState, FedsimError> {
        let mode = if self.sherman_morrison {
            InverseMode::ShermanMorrison
        } else {
            InverseMode::Recompute
        };
        Ok(BanditState::new(dim, self.lambda)?.with_inverse_mode(mode))
    }
}

/// One environment round: the observable contexts plus the noiseless means
/// behind them, kept aside for regret computation.
#[derive(Debug, Clone)]
pub struct EnvRound {
    pub contexts: ContextSet,
    pub noiseless_means: Vec<f64>,
}

impl EnvRound {
    pub fn best_mean(&self) -> f64 {
        self.noiseless_means.iter().copied().fold(f64::MIN, f64::max)
    }

    /// Instantaneous regret of playing `arm` this round.
    pub fn regret_of(&self, arm: usize) -> f64 {
        self.best_mean() - self.noiseless_means[arm]
    }
}

/// A reward-generating environment driving a run. `next_round` returning
/// `None` before the horizon truncates the run (flagged in the output).
pub trait Environment {
    fn next_round(&mut self) -> Option<EnvRound>;
    /// Realized (noisy) reward for the chosen arm this round.
    fn reward(&mut self, round: &EnvRound, arm: usize) -> f64;
}

/// Per-round outcome record.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub t: u64,
    pub arm: usize,
    pub reward: f64,
    pub regret: f64,
    /// `||theta_hat||` (the masked-space estimate for federated runs).
    pub theta_norm: f64,
    pub scores: Option<Vec<ArmScore>>,
}

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<RoundRecord>,
    pub ledger: Ledger,
    pub roster: Vec<ParticipantRole>,
    /// The mask used (federated runs only).
    pub mask: Option<Matrix>,
    /// Estimator after each update, when `record_theta` is set.
    pub theta_trace: Option<Vec<Vector>>,
    /// True when the environment ran out of rounds before the horizon.
    pub truncated: bool,
}

impl RunOutput {
    pub fn cumulative_regret(&self) -> f64 {
        self.records.iter().map(|r| r.regret).sum()
    }

    pub fn arm_sequence(&self) -> Vec<usize> {
        self.records.iter().map(|r| r.arm).collect()
    }
}

/// Dispatch on `cfg.algorithm`.
pub fn run(cfg: &RunConfig, env: &mut dyn Environment) -> Result<RunOutput, FedsimError> {
    match cfg.algorithm {
        Algorithm::VfUcb => run_vfucb(cfg, env),
        Algorithm::VfTs => run_vfts(cfg, env),
        Algorithm::LinUcb | Algorithm::LinTs => run_centralized(cfg, env),
        Algorithm::PartialLinUcb | Algorithm::PartialLinTs => run_partial(cfg, env),
    }
}

/// The federated UCB protocol with a freshly generated mask.
pub fn run_vfucb(cfg: &RunConfig, env: &mut dyn Environment) -> Result<RunOutput, FedsimError> {
    expect_algorithm(cfg, Algorithm::VfUcb, "vfucb")?;
    let mask = generate_mask(cfg)?;
    run_federated(cfg, env, mask)
}

/// The federated UCB protocol with a caller-supplied mask (identity-mask
/// degenerate runs, fault-injection checks).
pub fn run_vfucb_with_mask(
    cfg: &RunConfig,
    env: &mut dyn Environment,
    mask: Matrix,
) -> Result<RunOutput, FedsimError> {
    expect_algorithm(cfg, Algorithm::VfUcb, "vfucb")?;
    run_federated(cfg, env, mask)
}

/// The federated Thompson-sampling protocol with a freshly generated mask.
pub fn run_vfts(cfg: &RunConfig, env: &mut dyn Environment) -> Result<RunOutput, FedsimError> {
    expect_algorithm(cfg, Algorithm::VfTs, "vfts")?;
    let mask = generate_mask(cfg)?;
    run_federated(cfg, env, mask)
}

/// [`run_vfts`] with a caller-supplied mask.
pub fn run_vfts_with_mask(
    cfg: &RunConfig,
    env: &mut dyn Environment,
    mask: Matrix,
) -> Result<RunOutput, FedsimError> {
    expect_algorithm(cfg, Algorithm::VfTs, "vfts")?;
    run_federated(cfg, env, mask)
}

/// Centralized LinUCB/LinTS on raw contexts; the reference the losslessness
/// checks compare against. Produces an empty ledger.
pub fn run_centralized(
    cfg: &RunConfig,
    env: &mut dyn Environment,
) -> Result<RunOutput, FedsimError> {
    if !matches!(cfg.algorithm, Algorithm::LinUcb | Algorithm::LinTs) {
        return Err(FedsimError::AlgorithmMismatch {
            expected: "linucb or lints",
            got: cfg.algorithm,
        });
    }
    cfg.validate()?;
    run_plain(cfg, env, None)
}

/// Partial-information baseline: the bandit sees only a coordinate slice of
/// every context, while rewards and regret still come from the full model.
pub fn run_partial(cfg: &RunConfig, env: &mut dyn Environment) -> Result<RunOutput, FedsimError> {
    if !cfg.algorithm.is_partial() {
        return Err(FedsimError::AlgorithmMismatch {
            expected: "partial-linucb or partial-lints",
            got: cfg.algorithm,
        });
    }
    cfg.validate()?;
    let coords = match &cfg.partial_coords {
        Some(coords) => coords.clone(),
        None => {
            let keep = ((cfg.partial_ratio * cfg.dim as f64).ceil() as usize).clamp(1, cfg.dim);
            (0..keep).collect()
        }
    };
    run_plain(cfg, env, Some(coords))
}

fn expect_algorithm(
    cfg: &RunConfig,
    expected: Algorithm,
    name: &'static str,
) -> Result<(), FedsimError> {
    if cfg.algorithm != expected {
        return Err(FedsimError::AlgorithmMismatch {
            expected: name,
            got: cfg.algorithm,
        });
    }
    cfg.validate()
}

fn generate_mask(cfg: &RunConfig) -> Result<Matrix, FedsimError> {
    let mut mask_rng = Rng::seed_from_u64(stream_seed(cfg.seed, "o3m-mask"));
    Ok(random_orthogonal(cfg.dim, &mut mask_rng)?)
}

fn check_round(cfg: &RunConfig, round: &EnvRound) -> Result<(), FedsimError> {
    if round.contexts.arms() != cfg.arms {
        return Err(FedsimError::EnvironmentArms {
            expected: cfg.arms,
            got: round.contexts.arms(),
        });
    }
    if round.contexts.dim() != cfg.dim {
        return Err(FedsimError::EnvironmentDim {
            expected: cfg.dim,
            got: round.contexts.dim(),
        });
    }
    Ok(())
}

/// Centralized and partial loops share this body; `coords` selects the
/// visible slice for partial runs.
fn run_plain(
    cfg: &RunConfig,
    env: &mut dyn Environment,
    coords: Option<Vec<usize>>,
) -> Result<RunOutput, FedsimError> {
    let visible_dim = coords.as_ref().map_or(cfg.dim, Vec::len);
    let mut state = cfg.state_with_dim(visible_dim)?;
    let ucb = UcbParams::new(cfg.beta)?;
    let ts = TsParams::new(cfg.v)?;
    let mut ts_rng = Rng::seed_from_u64(stream_seed(cfg.seed, "ts-sampler"));

    let mut records = Vec::with_capacity(cfg.horizon);
    let mut theta_trace = cfg.record_theta.then(Vec::new);
    let mut truncated = false;

    for t in 0..cfg.horizon {
        let Some(round) = env.next_round() else {
            truncated = true;
            break;
        };
        check_round(cfg, &round)?;
        let visible = match &coords {
            None => round.contexts.clone(),
            Some(coords) => round.contexts.map(|x| Ok(x.gather(coords)?))?,
        };
        let scores = if cfg.algorithm.is_thompson() {
            ts_scores(&state, &ts, &visible, &mut ts_rng)?.0
        } else {
            ucb_scores(&state, &ucb, &visible)?
        };
        let arm = select_arm(&scores)?;
        let reward = env.reward(&round, arm);
        state.update(visible.context(arm), reward)?;
        if let Some(trace) = &mut theta_trace {
            trace.push(state.theta_hat().clone());
        }
        records.push(RoundRecord {
            t: t as u64,
            arm,
            reward,
            regret: round.regret_of(arm),
            theta_norm: state.theta_norm(),
            scores: cfg.record_scores.then_some(scores),
        });
    }

    Ok(RunOutput {
        records,
        ledger: Ledger::new(),
        roster: Vec::new(),
        mask: None,
        theta_trace,
        truncated,
    })
}

/// The masked protocol loop shared by VFUCB and VFTS.
fn run_federated(
    cfg: &RunConfig,
    env: &mut dyn Environment,
    mask: Matrix,
) -> Result<RunOutput, FedsimError> {
    if mask.rows() != cfg.dim || mask.cols() != cfg.dim {
        return Err(FedsimError::MaskDimMismatch {
            rows: mask.rows(),
            cols: mask.cols(),
            dim: cfg.dim,
        });
    }
    let participants = cfg.partition.participants();
    let roster = build_roster(&cfg.partition, cfg.pmg)?;
    let generator = pmg_party(cfg.pmg);
    let ap = Party::Participant(1);
    let mut ledger = Ledger::new();

    // Mask delivery: every participant receives its column block, the
    // aggregator's own included.
    let shards = partition_mask(&mask, &cfg.partition)?;
    for shard in &shards {
        ledger.record(Message {
            kind: MessageKind::MaskShard,
            from: generator,
            to: Party::Participant(shard.owner() + 1),
            round: 0,
            elements: (mask.rows() * shard.local_dim()) as u64,
        });
    }

    let mut state = cfg.state()?;
    let ucb = UcbParams::new(cfg.beta)?;
    let ts = TsParams::new(cfg.v)?;
    let mut ts_rng = Rng::seed_from_u64(stream_seed(cfg.seed, "ts-sampler"));

    let mut records = Vec::with_capacity(cfg.horizon);
    let mut theta_trace = cfg.record_theta.then(Vec::new);
    let mut truncated = false;

    for t in 0..cfg.horizon {
        let Some(round) = env.next_round() else {
            truncated = true;
            break;
        };
        check_round(cfg, &round)?;

        // Each participant masks its slice of every arm's context and ships
        // the batch to the aggregator: K*d elements per sender per round.
        let mut shares: Vec<Vec<crate::o3m::MaskedContext>> =
            (0..cfg.arms).map(|_| Vec::with_capacity(participants)).collect();
        for (j, shard) in shards.iter().enumerate() {
            for (arm, x) in round.contexts.iter().enumerate() {
                let local = cfg.partition.slice(j, x)?;
                shares[arm].push(mask_local(shard, &local, arm, t as u64)?);
            }
            ledger.record(Message {
                kind: MessageKind::MaskedContext,
                from: Party::Participant(j + 1),
                to: ap,
                round: t as u64,
                elements: (cfg.arms * cfg.dim) as u64,
            });
        }
        let masked = ContextSet::new(
            shares
                .iter()
                .map(|arm_shares| Ok(aggregate(arm_shares)?.vec))
                .collect::<Result<Vec<_>, FedsimError>>()?,
        )?;

        let scores = if cfg.algorithm.is_thompson() {
            if cfg.coupled_ts {
                // Rotate the centralized factor: with F = Q chol(Q^T inv Q),
                // F F^T is still the masked-space covariance, but the
                // sampled parameter equals Q times the centralized sample,
                // making the two runs comparable path by path.
                let mut unmasked_inv = mask
                    .transpose()
                    .matmul(state.lambda_inv())?
                    .matmul(&mask)?;
                unmasked_inv.symmetrize();
                let factor = mask.matmul(&cholesky(&unmasked_inv)?)?;
                ts_scores_with_factor(&state, &ts, &masked, factor, &mut ts_rng)?.0
            } else {
                ts_scores(&state, &ts, &masked, &mut ts_rng)?.0
            }
        } else {
            ucb_scores(&state, &ucb, &masked)?
        };
        let arm = select_arm(&scores)?;

        ledger.record(Message {
            kind: MessageKind::Action,
            from: ap,
            to: Party::User,
            round: t as u64,
            elements: 1,
        });
        let reward = env.reward(&round, arm);
        ledger.record(Message {
            kind: MessageKind::Reward,
            from: Party::User,
            to: ap,
            round: t as u64,
            elements: 1,
        });

        state.update(masked.context(arm), reward)?;
        if let Some(trace) = &mut theta_trace {
            trace.push(state.theta_hat().clone());
        }
        records.push(RoundRecord {
            t: t as u64,
            arm,
            reward,
            regret: round.regret_of(arm),
            theta_norm: state.theta_norm(),
            scores: cfg.record_scores.then_some(scores),
        });
    }

    Ok(RunOutput {
        records,
        ledger,
        roster,
        mask: Some(mask),
        theta_trace,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::numerics::Rng;

    /// Deterministic test environment: fixed unit-norm contexts drawn once
    /// per round from a seeded stream, linear rewards without noise.
    struct LinearEnv {
        dim: usize,
        arms: usize,
        theta: Vector,
        rng: Rng,
        rounds_left: Option<usize>,
    }

    impl LinearEnv {
        fn new(dim: usize, arms: usize, seed: u64) -> Self {
            let mut rng = Rng::seed_from_u64(seed);
            let mut theta = rng.standard_normal_vector(dim);
            theta.normalize().unwrap();
            Self {
                dim,
                arms,
                theta,
                rng,
                rounds_left: None,
            }
        }

        fn limited(mut self, rounds: usize) -> Self {
            self.rounds_left = Some(rounds);
            self
        }
    }

    impl Environment for LinearEnv {
        fn next_round(&mut self) -> Option<EnvRound> {
            if let Some(left) = &mut self.rounds_left {
                if *left == 0 {
                    return None;
                }
                *left -= 1;
            }
            let contexts: Vec<Vector> = (0..self.arms)
                .map(|_| {
                    let mut x = self.rng.standard_normal_vector(self.dim);
                    x.normalize().unwrap();
                    x
                })
                .collect();
            let means = contexts
                .iter()
                .map(|x| x.dot(&self.theta).unwrap())
                .collect();
            Some(EnvRound {
                contexts: ContextSet::new(contexts).unwrap(),
                noiseless_means: means,
            })
        }

        fn reward(&mut self, round: &EnvRound, arm: usize) -> f64 {
            round.noiseless_means[arm]
        }
    }

    fn fed_cfg(alg: Algorithm, horizon: usize, arms: usize, dim: usize, parts: usize) -> RunConfig {
        RunConfig::new(alg, horizon, arms, dim)
            .with_partition(DimPartition::even(dim, parts).unwrap())
    }

    #[test]
    fn vfucb_matches_centralized_on_small_instance() {
        for seed in [0u64, 1, 2] {
            let cfg_fed = fed_cfg(Algorithm::VfUcb, 60, 5, 12, 3).with_seed(seed);
            let mut cfg_central = cfg_fed.clone();
            cfg_central.algorithm = Algorithm::LinUcb;

            let fed = run_vfucb(&cfg_fed, &mut LinearEnv::new(12, 5, seed)).unwrap();
            let central = run_centralized(&cfg_central, &mut LinearEnv::new(12, 5, seed)).unwrap();
            assert_eq!(fed.arm_sequence(), central.arm_sequence(), "seed {seed}");
        }
    }

    #[test]
    fn first_round_arm_matches_centralized() {
        let cfg_fed = fed_cfg(Algorithm::VfUcb, 1, 4, 8, 2);
        let mut cfg_central = cfg_fed.clone();
        cfg_central.algorithm = Algorithm::LinUcb;
        let fed = run_vfucb(&cfg_fed, &mut LinearEnv::new(8, 4, 0)).unwrap();
        let central = run_centralized(&cfg_central, &mut LinearEnv::new(8, 4, 0)).unwrap();
        assert_eq!(fed.records[0].arm, central.records[0].arm);
    }

    #[test]
    fn identity_mask_reduces_to_centralized_and_ledgers_masked_bytes() {
        let (t, k, d) = (50, 3, 4);
        let cfg_fed = RunConfig::new(Algorithm::VfUcb, t, k, d);
        let mut cfg_central = cfg_fed.clone();
        cfg_central.algorithm = Algorithm::LinUcb;

        let fed = run_vfucb_with_mask(
            &cfg_fed,
            &mut LinearEnv::new(d, k, 7),
            Matrix::identity(d),
        )
        .unwrap();
        let central = run_centralized(&cfg_central, &mut LinearEnv::new(d, k, 7)).unwrap();
        assert_eq!(fed.arm_sequence(), central.arm_sequence());
        // One sender (M = 1): masked-context bytes are 8 * T * K * d.
        assert_eq!(
            fed.ledger.elements_of_kind(MessageKind::MaskedContext) * ELEMENT_BYTES,
            (8 * t * k * d) as u64
        );
    }

    #[test]
    fn masked_context_elements_follow_the_closed_form() {
        let (t, k, d, m) = (50usize, 3usize, 4usize, 2usize);
        let cfg = fed_cfg(Algorithm::VfUcb, t, k, d, m);
        let out = run_vfucb(&cfg, &mut LinearEnv::new(d, k, 0)).unwrap();
        assert_eq!(
            out.ledger.elements_of_kind(MessageKind::MaskedContext),
            (t * k * m * d) as u64
        );
        assert_eq!(
            out.ledger.elements_of_kind(MessageKind::MaskShard),
            (d * d) as u64
        );
        assert_eq!(
            out.ledger.o3m_elements(),
            (d * d + t * k * m * d) as u64
        );
        // The user channel adds one action and one reward element per round.
        assert_eq!(out.ledger.total_elements(), out.ledger.o3m_elements() + 2 * t as u64);
    }

    #[test]
    fn vfts_coupled_matches_centralized_lints() {
        let cfg_fed = {
            let mut c = fed_cfg(Algorithm::VfTs, 40, 4, 10, 2).with_seed(5);
            c.coupled_ts = true;
            c.v = 0.1;
            c
        };
        let mut cfg_central = cfg_fed.clone();
        cfg_central.algorithm = Algorithm::LinTs;
        let fed = run_vfts(&cfg_fed, &mut LinearEnv::new(10, 4, 5)).unwrap();
        let central = run_centralized(&cfg_central, &mut LinearEnv::new(10, 4, 5)).unwrap();
        assert_eq!(fed.arm_sequence(), central.arm_sequence());
    }

    #[test]
    fn vfts_with_zero_v_equals_greedy_vfucb() {
        let mut cfg_ts = fed_cfg(Algorithm::VfTs, 30, 3, 8, 2).with_seed(3);
        cfg_ts.v = 0.0;
        let mut cfg_ucb = cfg_ts.clone();
        cfg_ucb.algorithm = Algorithm::VfUcb;
        cfg_ucb.beta = 0.0;
        let ts = run_vfts(&cfg_ts, &mut LinearEnv::new(8, 3, 3)).unwrap();
        let ucb = run_vfucb(&cfg_ucb, &mut LinearEnv::new(8, 3, 3)).unwrap();
        assert_eq!(ts.arm_sequence(), ucb.arm_sequence());
    }

    #[test]
    fn partial_with_full_ratio_is_the_centralized_run() {
        let mut cfg_partial = RunConfig::new(Algorithm::PartialLinUcb, 40, 3, 6).with_seed(2);
        cfg_partial.partial_ratio = 1.0;
        let mut cfg_central = cfg_partial.clone();
        cfg_central.algorithm = Algorithm::LinUcb;
        let partial = run_partial(&cfg_partial, &mut LinearEnv::new(6, 3, 2)).unwrap();
        let central = run_centralized(&cfg_central, &mut LinearEnv::new(6, 3, 2)).unwrap();
        assert_eq!(partial.arm_sequence(), central.arm_sequence());
        for (a, b) in partial.records.iter().zip(&central.records) {
            assert_eq!(a.reward.to_bits(), b.reward.to_bits());
            assert_eq!(a.regret.to_bits(), b.regret.to_bits());
        }
    }

    #[test]
    fn partial_supports_explicit_coordinate_subsets() {
        let mut cfg = RunConfig::new(Algorithm::PartialLinUcb, 10, 3, 6).with_seed(2);
        cfg.partial_ratio = 0.5;
        cfg.partial_coords = Some(vec![5, 0, 3]);
        let out = run_partial(&cfg, &mut LinearEnv::new(6, 3, 2)).unwrap();
        assert_eq!(out.records.len(), 10);

        cfg.partial_coords = Some(vec![6]);
        assert!(matches!(
            run_partial(&cfg, &mut LinearEnv::new(6, 3, 2)),
            Err(FedsimError::PartialCoordOutOfRange { coord: 6, dim: 6 })
        ));
    }

    #[test]
    fn runs_are_bitwise_deterministic() {
        let cfg = {
            let mut c = fed_cfg(Algorithm::VfTs, 25, 4, 9, 3).with_seed(11);
            c.record_scores = true;
            c.v = 0.05;
            c
        };
        let a = run_vfts(&cfg, &mut LinearEnv::new(9, 4, 11)).unwrap();
        let b = run_vfts(&cfg, &mut LinearEnv::new(9, 4, 11)).unwrap();
        assert_eq!(a.records.len(), b.records.len());
        for (ra, rb) in a.records.iter().zip(&b.records) {
            assert_eq!(ra.arm, rb.arm);
            assert_eq!(ra.reward.to_bits(), rb.reward.to_bits());
            assert_eq!(ra.regret.to_bits(), rb.regret.to_bits());
            assert_eq!(ra.theta_norm.to_bits(), rb.theta_norm.to_bits());
            let (sa, sb) = (ra.scores.as_ref().unwrap(), rb.scores.as_ref().unwrap());
            for (x, y) in sa.iter().zip(sb) {
                assert_eq!(x.value.to_bits(), y.value.to_bits());
            }
        }
    }

    #[test]
    fn environment_exhaustion_truncates_and_flags() {
        let cfg = RunConfig::new(Algorithm::LinUcb, 50, 3, 4);
        let mut env = LinearEnv::new(4, 3, 1).limited(20);
        let out = run_centralized(&cfg, &mut env).unwrap();
        assert!(out.truncated);
        assert_eq!(out.records.len(), 20);
    }

    #[test]
    fn regret_is_nonnegative_and_single_arm_has_none() {
        let cfg = RunConfig::new(Algorithm::LinUcb, 30, 1, 4);
        let out = run_centralized(&cfg, &mut LinearEnv::new(4, 1, 9)).unwrap();
        assert!(out.records.iter().all(|r| r.arm == 0));
        assert!(out.records.iter().all(|r| r.regret == 0.0));

        let cfg = fed_cfg(Algorithm::VfUcb, 30, 4, 8, 2);
        let out = run_vfucb(&cfg, &mut LinearEnv::new(8, 4, 9)).unwrap();
        assert!(out.records.iter().all(|r| r.regret >= 0.0));
    }

    #[test]
    fn mismatched_algorithms_are_rejected() {
        let cfg = RunConfig::new(Algorithm::LinUcb, 10, 2, 4);
        assert!(matches!(
            run_vfucb(&cfg, &mut LinearEnv::new(4, 2, 0)),
            Err(FedsimError::AlgorithmMismatch { .. })
        ));
        let cfg = RunConfig::new(Algorithm::VfUcb, 10, 2, 4);
        assert!(matches!(
            run_centralized(&cfg, &mut LinearEnv::new(4, 2, 0)),
            Err(FedsimError::AlgorithmMismatch { .. })
        ));
    }

    #[test]
    fn federated_partition_must_cover_the_dimension() {
        let cfg = RunConfig::new(Algorithm::VfUcb, 10, 2, 4)
            .with_partition(DimPartition::new(vec![1, 2]).unwrap());
        assert!(matches!(
            run_vfucb(&cfg, &mut LinearEnv::new(4, 2, 0)),
            Err(FedsimError::PartitionDimMismatch { .. })
        ));
    }
}
