//! Analytical compute and communication cost models.
//!
//! The compute model is a unit-coefficient upper bound: every elementary
//! term a stage performs (one addition, multiplication, comparison, or
//! random generation per matrix element; d^3 for a factorization or
//! inverse) is counted with coefficient 1, and stages are summed. It is an
//! analytical model, not a measurement — its use is comparing protocol
//! variants, not predicting wall-clock time.
//!
//! Stages: (1) mask initialization, once per run — generate a d x d random
//! matrix (d^2) and orthogonalize it (d^3); federated variants only.
//! (2) Selection, per round — masking and adding shares (K d^2 + K M d,
//! federated only), then the variant's scoring work. (3) Update, per round
//! — the rank-1 statistics update and estimator refresh.
//!
//! Communication follows the closed form `d^2 + T K M d` elements (mask
//! delivery once, K masked d-vectors from each of M participants per
//! round), 8 bytes per element; centralized variants transfer nothing.

use crate::fedsim::{Algorithm, ELEMENT_BYTES};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CostError {
    #[error("cost model does not cover {0:?}")]
    UnsupportedAlgorithm(Algorithm),
    #[error("{fed:?} / {central:?} is not a federated/centralized pair")]
    NotAPair { fed: Algorithm, central: Algorithm },
    #[error("cost exceeds 64-bit range")]
    Overflow,
}

/// Scale parameters of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostParams {
    pub horizon: u64,
    pub arms: u64,
    pub participants: u64,
    pub dim: u64,
}

impl CostParams {
    /// A zero horizon is allowed and means mask delivery only (no rounds);
    /// the other parameters must be positive.
    pub fn new(horizon: u64, arms: u64, participants: u64, dim: u64) -> Self {
        assert!(
            arms >= 1 && participants >= 1 && dim >= 1,
            "cost parameters must be positive"
        );
        Self {
            horizon,
            arms,
            participants,
            dim,
        }
    }
}

/// Per-stage operation counts plus the communication totals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostBreakdown {
    /// Mask initialization (zero for centralized variants).
    pub stage_mask_init: u64,
    /// Selection work summed over the horizon.
    pub stage_selection: u64,
    /// Update work summed over the horizon.
    pub stage_update: u64,
    pub total_ops: u64,
    /// Transferred elements (zero for centralized variants).
    pub comm_elements: u64,
    pub comm_bytes: u64,
}

struct Checked;

impl Checked {
    fn mul(terms: &[u64]) -> Result<u64, CostError> {
        terms
            .iter()
            .try_fold(1u64, |acc, &t| acc.checked_mul(t).ok_or(CostError::Overflow))
    }

    fn sum(terms: &[u64]) -> Result<u64, CostError> {
        terms
            .iter()
            .try_fold(0u64, |acc, &t| acc.checked_add(t).ok_or(CostError::Overflow))
    }
}

fn pow3(d: u64) -> Result<u64, CostError> {
    Checked::mul(&[d, d, d])
}

fn pow2(d: u64) -> Result<u64, CostError> {
    Checked::mul(&[d, d])
}

/// Stage-1 cost shared by the federated variants: random matrix generation
/// plus orthogonalization.
fn mask_init(p: &CostParams) -> Result<u64, CostError> {
    Checked::sum(&[pow2(p.dim)?, pow3(p.dim)?])
}

/// The masking work the protocol adds to every selection round:
/// `K d^2` multiplications to mask plus `K M d` additions to aggregate.
fn masking_per_round(p: &CostParams) -> Result<u64, CostError> {
    Checked::sum(&[
        Checked::mul(&[p.arms, pow2(p.dim)?])?,
        Checked::mul(&[p.arms, p.participants, p.dim])?,
    ])
}

/// Everything the protocol adds on top of its centralized counterpart:
/// mask initialization plus per-round masking and aggregation.
pub fn o3m_overhead(p: &CostParams) -> Result<u64, CostError> {
    Checked::sum(&[
        mask_init(p)?,
        Checked::mul(&[p.horizon, masking_per_round(p)?])?,
    ])
}

/// Per-stage operation counts for one algorithm at the given scale.
pub fn compute_ops(alg: Algorithm, p: &CostParams) -> Result<CostBreakdown, CostError> {
    let (k, d) = (p.arms, p.dim);
    let kd = Checked::mul(&[k, d])?;
    let kd2 = Checked::mul(&[k, pow2(d)?])?;

    // Selection work per round, past any masking: UCB variants score means
    // (K d), refresh the inverse (d^3), and compute bonuses (K d^2) before
    // the argmax (K); Thompson variants scale the covariance (d^2), factor
    // and sample (d^3), score (K d), argmax (K).
    let ucb_scoring = Checked::sum(&[kd, pow3(d)?, kd2, k])?;
    let ts_scoring = Checked::sum(&[pow2(d)?, pow3(d)?, kd, k])?;

    // Update work per round: UCB variants update the statistics (d^2),
    // accumulator (d), estimator (d^2); Thompson variants additionally
    // refresh the inverse here (d + d^3 + d + d^2).
    let ucb_update = Checked::sum(&[pow2(d)?, d, pow2(d)?])?;
    let ts_update = Checked::sum(&[d, pow3(d)?, d, pow2(d)?])?;

    let (stage_mask_init, selection_per_round, update_per_round, federated) = match alg {
        Algorithm::VfUcb => (
            mask_init(p)?,
            Checked::sum(&[masking_per_round(p)?, ucb_scoring])?,
            ucb_update,
            true,
        ),
        Algorithm::LinUcb => (0, ucb_scoring, ucb_update, false),
        Algorithm::VfTs => (
            mask_init(p)?,
            Checked::sum(&[masking_per_round(p)?, ts_scoring])?,
            ts_update,
            true,
        ),
        Algorithm::LinTs => (0, ts_scoring, ts_update, false),
        other => return Err(CostError::UnsupportedAlgorithm(other)),
    };

    let stage_selection = Checked::mul(&[p.horizon, selection_per_round])?;
    let stage_update = Checked::mul(&[p.horizon, update_per_round])?;
    let total_ops = Checked::sum(&[stage_mask_init, stage_selection, stage_update])?;
    let comm_elements = if federated { comm_elements(p)? } else { 0 };

    Ok(CostBreakdown {
        stage_mask_init,
        stage_selection,
        stage_update,
        total_ops,
        comm_elements,
        comm_bytes: comm_elements
            .checked_mul(ELEMENT_BYTES)
            .ok_or(CostError::Overflow)?,
    })
}

/// Total transferred elements over a run: `d^2 + T K M d`.
pub fn comm_elements(p: &CostParams) -> Result<u64, CostError> {
    Checked::sum(&[
        pow2(p.dim)?,
        Checked::mul(&[p.horizon, p.arms, p.participants, p.dim])?,
    ])
}

/// Elements transferred in one round of the steady state: `K M d`.
pub fn comm_elements_per_round(p: &CostParams) -> Result<u64, CostError> {
    Checked::mul(&[p.arms, p.participants, p.dim])
}

pub fn comm_bytes(p: &CostParams) -> Result<u64, CostError> {
    comm_elements(p)?
        .checked_mul(ELEMENT_BYTES)
        .ok_or(CostError::Overflow)
}

/// Ratio of total operations between a federated variant and its
/// centralized counterpart.
pub fn relative_cost(
    fed: Algorithm,
    central: Algorithm,
    p: &CostParams,
) -> Result<f64, CostError> {
    let paired = matches!(
        (fed, central),
        (Algorithm::VfUcb, Algorithm::LinUcb) | (Algorithm::VfTs, Algorithm::LinTs)
    );
    if !paired {
        return Err(CostError::NotAPair { fed, central });
    }
    let fed_total = compute_ops(fed, p)?.total_ops;
    let central_total = compute_ops(central, p)?.total_ops;
    Ok(fed_total as f64 / central_total as f64)
}
