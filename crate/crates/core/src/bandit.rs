//! Centralized LinUCB and LinTS.
//!
//! Both algorithms share one set of sufficient statistics: the regularized
//! design matrix `lambda_mat = lambda * I + sum x x^T`, its inverse, the
//! response accumulator `u = sum r x`, and the ridge estimate
//! `theta_hat = inv(lambda_mat) u`. Scoring differs: LinUCB adds an
//! exploration bonus `beta * sqrt(x^T inv(lambda_mat) x)` to the point
//! estimate, LinTS scores against a parameter vector sampled from
//! `N(theta_hat, v^2 inv(lambda_mat))`.

use crate::numerics::{cholesky, mvn_from_z, spd_inverse, Matrix, NumericsError, Rng, Vector};
use crate::tolerances;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BanditError {
    #[error("context dimension {got} does not match state dimension {expected}")]
    DimMismatch { expected: usize, got: usize },
    #[error("empty context set")]
    EmptyContexts,
    #[error("reward is not finite")]
    NonFiniteReward,
    #[error("parameter {name} must be finite and non-negative, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("exploration radicand {radicand:e} for arm {arm} is negative beyond roundoff")]
    NegativeRadicand { arm: usize, radicand: f64 },
    #[error("score for arm {arm} is NaN")]
    NaNScore { arm: usize },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// The per-round feature vectors, one per arm, all of one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextSet {
    contexts: Vec<Vector>,
}

impl ContextSet {
    pub fn new(contexts: Vec<Vector>) -> Result<Self, BanditError> {
        let dim = contexts.first().ok_or(BanditError::EmptyContexts)?.dim();
        if let Some(bad) = contexts.iter().find(|c| c.dim() != dim) {
            return Err(BanditError::DimMismatch {
                expected: dim,
                got: bad.dim(),
            });
        }
        Ok(Self { contexts })
    }

    pub fn arms(&self) -> usize {
        self.contexts.len()
    }

    pub fn dim(&self) -> usize {
        self.contexts[0].dim()
    }

    pub fn context(&self, arm: usize) -> &Vector {
        &self.contexts[arm]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vector> {
        self.contexts.iter()
    }

    /// Apply `f` to every context (used to mask or slice a whole set).
    pub fn map(
        &self,
        f: impl FnMut(&Vector) -> Result<Vector, BanditError>,
    ) -> Result<Self, BanditError> {
        let contexts = self
            .contexts
            .iter()
            .map(f)
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(contexts)
    }
}

/// How the stored inverse is maintained across updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InverseMode {
    /// Re-factorize `lambda_mat` every update (cubic, numerically robust;
    /// matches the per-round accounting in the cost model).
    #[default]
    Recompute,
    /// Rank-1 Sherman-Morrison update of the stored inverse (quadratic).
    ShermanMorrison,
}

/// Sufficient statistics shared by LinUCB and LinTS.
#[derive(Debug, Clone)]
pub struct BanditState {
    dim: usize,
    lambda: f64,
    lambda_mat: Matrix,
    lambda_inv: Matrix,
    u: Vector,
    theta_hat: Vector,
    t: u64,
    inverse_mode: InverseMode,
}

impl BanditState {
    /// Fresh state: `lambda_mat = lambda * I`, `u = 0`, `theta_hat = 0`.
    pub fn new(dim: usize, lambda: f64) -> Result<Self, BanditError> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(BanditError::InvalidParameter {
                name: "lambda",
                value: lambda,
            });
        }
        Ok(Self {
            dim,
            lambda,
            lambda_mat: Matrix::scaled_identity(dim, lambda),
            lambda_inv: Matrix::scaled_identity(dim, 1.0 / lambda),
            u: Vector::zeros(dim),
            theta_hat: Vector::zeros(dim),
            t: 0,
            inverse_mode: InverseMode::default(),
        })
    }

    pub fn with_inverse_mode(mut self, mode: InverseMode) -> Self {
        self.inverse_mode = mode;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn round(&self) -> u64 {
        self.t
    }

    pub fn lambda_mat(&self) -> &Matrix {
        &self.lambda_mat
    }

    pub fn lambda_inv(&self) -> &Matrix {
        &self.lambda_inv
    }

    pub fn u(&self) -> &Vector {
        &self.u
    }

    pub fn theta_hat(&self) -> &Vector {
        &self.theta_hat
    }

    pub fn theta_norm(&self) -> f64 {
        self.theta_hat.norm2()
    }

    fn check_dim(&self, x: &Vector) -> Result<(), BanditError> {
        if x.dim() != self.dim {
            return Err(BanditError::DimMismatch {
                expected: self.dim,
                got: x.dim(),
            });
        }
        Ok(())
    }

    /// Rank-1 update with the observed `(x, r)` pair:
    /// `lambda_mat += x x^T`, `u += r x`, then the inverse and
    /// `theta_hat = inv(lambda_mat) u` are refreshed and the round counter
    /// advances.
    pub fn update(&mut self, x: &Vector, r: f64) -> Result<(), BanditError> {
        self.check_dim(x)?;
        if !r.is_finite() {
            return Err(BanditError::NonFiniteReward);
        }
        self.lambda_mat.add_outer(1.0, x)?;
        self.u.axpy(r, x)?;
        match self.inverse_mode {
            InverseMode::Recompute => {
                self.lambda_inv = spd_inverse(&self.lambda_mat)?;
            }
            InverseMode::ShermanMorrison => {
                let y = self.lambda_inv.matvec(x)?;
                let denom = 1.0 + x.dot(&y)?;
                self.lambda_inv.add_outer(-1.0 / denom, &y)?;
                self.lambda_inv.symmetrize();
            }
        }
        self.theta_hat = self.lambda_inv.matvec(&self.u)?;
        self.t += 1;
        Ok(())
    }
}

/// Exploration coefficient for LinUCB, held constant over a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UcbParams {
    pub beta: f64,
}

impl UcbParams {
    pub fn new(beta: f64) -> Result<Self, BanditError> {
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(BanditError::InvalidParameter {
                name: "beta",
                value: beta,
            });
        }
        Ok(Self { beta })
    }
}

/// Prior standard-deviation scale for LinTS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsParams {
    pub v: f64,
}

impl TsParams {
    pub fn new(v: f64) -> Result<Self, BanditError> {
        if !(v.is_finite() && v >= 0.0) {
            return Err(BanditError::InvalidParameter { name: "v", value: v });
        }
        Ok(Self { v })
    }
}

/// One arm's decomposed score. For LinUCB `value = mean + bonus` with
/// `bonus >= 0`; for LinTS `bonus = 0` and `value = mean` under the sampled
/// parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmScore {
    pub arm: usize,
    pub mean: f64,
    pub bonus: f64,
    pub value: f64,
}

/// The randomness behind one LinTS scoring call, exposed so two runs can be
/// coupled draw-for-draw: the unscaled factor `A` (with
/// `A A^T = inv(lambda_mat)`), the raw standard-normal vector `z`, and the
/// sampled parameter `mu = theta_hat + v * A z`.
#[derive(Debug, Clone)]
pub struct TsDraw {
    pub mu: Vector,
    pub z: Vector,
    pub factor: Matrix,
}

/// UCB value per arm: `x^T theta_hat + beta * sqrt(x^T inv(lambda_mat) x)`.
///
/// The stored inverse is reused across arms. Radicands within
/// [`tolerances::RADICAND_CLAMP`] of zero are clamped to zero; anything more
/// negative signals corrupted state and is an error.
pub fn ucb_scores(
    state: &BanditState,
    params: &UcbParams,
    contexts: &ContextSet,
) -> Result<Vec<ArmScore>, BanditError> {
    if contexts.dim() != state.dim {
        return Err(BanditError::DimMismatch {
            expected: state.dim,
            got: contexts.dim(),
        });
    }
    let mut scores = Vec::with_capacity(contexts.arms());
    for (arm, x) in contexts.iter().enumerate() {
        let mean = x.dot(&state.theta_hat)?;
        let radicand = x.dot(&state.lambda_inv.matvec(x)?)?;
        if radicand < tolerances::RADICAND_CLAMP {
            return Err(BanditError::NegativeRadicand { arm, radicand });
        }
        let bonus = params.beta * radicand.max(0.0).sqrt();
        scores.push(ArmScore {
            arm,
            mean,
            bonus,
            value: mean + bonus,
        });
    }
    Ok(scores)
}

/// LinTS scores: sample `mu ~ N(theta_hat, v^2 inv(lambda_mat))` once, then
/// value every arm as `x^T mu`. The factor is the Cholesky factor of the
/// stored inverse.
pub fn ts_scores(
    state: &BanditState,
    params: &TsParams,
    contexts: &ContextSet,
    rng: &mut Rng,
) -> Result<(Vec<ArmScore>, TsDraw), BanditError> {
    let factor = cholesky(&state.lambda_inv)?;
    ts_scores_with_factor(state, params, contexts, factor, rng)
}

/// LinTS scoring with a caller-supplied unscaled covariance factor `A`
/// satisfying `A A^T = inv(lambda_mat)`. Exactly `A.cols()` standard-normal
/// deviates are consumed from `rng` regardless of `v`, so differently
/// factored runs stay draw-aligned.
pub fn ts_scores_with_factor(
    state: &BanditState,
    params: &TsParams,
    contexts: &ContextSet,
    factor: Matrix,
    rng: &mut Rng,
) -> Result<(Vec<ArmScore>, TsDraw), BanditError> {
    if contexts.dim() != state.dim {
        return Err(BanditError::DimMismatch {
            expected: state.dim,
            got: contexts.dim(),
        });
    }
    if factor.rows() != state.dim {
        return Err(BanditError::DimMismatch {
            expected: state.dim,
            got: factor.rows(),
        });
    }
    let z = rng.standard_normal_vector(factor.cols());
    let mu = mvn_from_z(&state.theta_hat, &factor.scale(params.v), &z)?;
    let mut scores = Vec::with_capacity(contexts.arms());
    for (arm, x) in contexts.iter().enumerate() {
        let mean = x.dot(&mu)?;
        scores.push(ArmScore {
            arm,
            mean,
            bonus: 0.0,
            value: mean,
        });
    }
    Ok((scores, TsDraw { mu, z, factor }))
}

/// Smallest index attaining the maximal value, where values within the
/// absolute window [`tolerances::ARM_TIE`] of the maximum count as attaining
/// it. Exact ties and roundoff-level near-ties (e.g. between a masked score
/// and its centralized counterpart) therefore resolve to the same index in
/// every run. NaN anywhere is an error.
pub fn select_arm(scores: &[ArmScore]) -> Result<usize, BanditError> {
    if scores.is_empty() {
        return Err(BanditError::EmptyContexts);
    }
    let mut best_value = f64::NEG_INFINITY;
    for (i, s) in scores.iter().enumerate() {
        if s.value.is_nan() {
            return Err(BanditError::NaNScore { arm: i });
        }
        best_value = best_value.max(s.value);
    }
    let winner = scores
        .iter()
        .position(|s| s.value >= best_value - tolerances::ARM_TIE)
        .expect("a maximal value exists");
    Ok(winner)
}
