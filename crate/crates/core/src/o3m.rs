//! The orthogonal-mask mechanism.
//!
//! One orthogonal matrix `Q` is generated per run and partitioned by
//! columns into per-participant shards `Q = [Q^1 | Q^2 | ... | Q^M]`, shard
//! `j` holding `d_j` contiguous columns in participant order. Participant
//! `j` masks its local slice `x^j` of a context as `Q^j x^j` (a full
//! `d`-dimensional vector regardless of `d_j`), and the aggregator sums the
//! masked shares. Because the blocks partition `Q`'s columns, the sum equals
//! `Q x` for the concatenated raw context — the identity the protocol's
//! losslessness rests on.

use crate::numerics::{random_orthogonal, Matrix, NumericsError, Rng, Vector};
use crate::tolerances;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum O3mError {
    #[error("partition sums to {sum} but the mask has {dim} columns")]
    PartitionSumMismatch { sum: usize, dim: usize },
    #[error("partition entries must be positive")]
    EmptyPartitionPart,
    #[error("mask must be square, got {rows} x {cols}")]
    MaskNotSquare { rows: usize, cols: usize },
    #[error("local context has dimension {got}, shard {owner} expects {expected}")]
    LocalDimMismatch {
        owner: usize,
        expected: usize,
        got: usize,
    },
    #[error("cannot aggregate an empty set of masked contexts")]
    NothingToAggregate,
    #[error("masked contexts disagree on round/arm: ({round_a}, {arm_a}) vs ({round_b}, {arm_b})")]
    MixedRounds {
        round_a: u64,
        arm_a: usize,
        round_b: u64,
        arm_b: usize,
    },
    #[error("witness rotation stayed too close to the original after {attempts} attempts")]
    DegenerateWitness { attempts: usize },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// How a context dimension `d` is split across `M` participants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimPartition {
    dims: Vec<usize>,
}

impl DimPartition {
    pub fn new(dims: Vec<usize>) -> Result<Self, O3mError> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(O3mError::EmptyPartitionPart);
        }
        Ok(Self { dims })
    }

    /// Split `dim` as evenly as possible across `participants`; the first
    /// `dim % participants` parts receive one extra coordinate.
    pub fn even(dim: usize, participants: usize) -> Result<Self, O3mError> {
        if participants == 0 || dim < participants {
            return Err(O3mError::EmptyPartitionPart);
        }
        let base = dim / participants;
        let extra = dim % participants;
        Self::new(
            (0..participants)
                .map(|j| base + usize::from(j < extra))
                .collect(),
        )
    }

    pub fn parts(&self) -> &[usize] {
        &self.dims
    }

    pub fn participants(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Coordinate offset where participant `j`'s slice begins.
    pub fn offset(&self, j: usize) -> usize {
        self.dims[..j].iter().sum()
    }

    /// Participant `j`'s slice of a full context vector.
    pub fn slice(&self, j: usize, x: &Vector) -> Result<Vector, O3mError> {
        let start = self.offset(j);
        let coords: Vec<usize> = (start..start + self.dims[j]).collect();
        Ok(x.gather(&coords)?)
    }
}

/// One participant's column block of the mask.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskShard {
    owner: usize,
    block: Matrix,
}

impl MaskShard {
    pub fn new(owner: usize, block: Matrix) -> Self {
        Self { owner, block }
    }

    /// Participant index (0-based position in the partition).
    pub fn owner(&self) -> usize {
        self.owner
    }

    pub fn block(&self) -> &Matrix {
        &self.block
    }

    pub fn local_dim(&self) -> usize {
        self.block.cols()
    }
}

/// A masked local context: always full-dimensional, tagged with the arm and
/// round it belongs to so shares from different decisions cannot be mixed.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedContext {
    pub vec: Vector,
    pub arm: usize,
    pub round: u64,
}

/// Split a square mask into per-participant column blocks; shard `j` takes
/// the contiguous columns `[sum of d_i for i < j, sum for i <= j)`.
pub fn partition_mask(q: &Matrix, part: &DimPartition) -> Result<Vec<MaskShard>, O3mError> {
    if !q.is_square() {
        return Err(O3mError::MaskNotSquare {
            rows: q.rows(),
            cols: q.cols(),
        });
    }
    if part.total_dim() != q.cols() {
        return Err(O3mError::PartitionSumMismatch {
            sum: part.total_dim(),
            dim: q.cols(),
        });
    }
    let mut shards = Vec::with_capacity(part.participants());
    let mut start = 0;
    for (owner, &dj) in part.parts().iter().enumerate() {
        shards.push(MaskShard::new(owner, q.column_block(start, start + dj)?));
        start += dj;
    }
    Ok(shards)
}

/// Mask a local context slice: `vec = block * x_local`.
pub fn mask_local(
    shard: &MaskShard,
    x_local: &Vector,
    arm: usize,
    round: u64,
) -> Result<MaskedContext, O3mError> {
    if x_local.dim() != shard.local_dim() {
        return Err(O3mError::LocalDimMismatch {
            owner: shard.owner,
            expected: shard.local_dim(),
            got: x_local.dim(),
        });
    }
    Ok(MaskedContext {
        vec: shard.block.matvec(x_local)?,
        arm,
        round,
    })
}

/// Entrywise sum of masked shares for one (round, arm). When the shares come
/// from one partition of a mask `Q` applied to the slices of a context `x`,
/// the sum equals `Q x`.
pub fn aggregate(masked: &[MaskedContext]) -> Result<MaskedContext, O3mError> {
    let first = masked.first().ok_or(O3mError::NothingToAggregate)?;
    let mut sum = first.vec.clone();
    for m in &masked[1..] {
        if m.round != first.round || m.arm != first.arm {
            return Err(O3mError::MixedRounds {
                round_a: first.round,
                arm_a: first.arm,
                round_b: m.round,
                arm_b: m.arm,
            });
        }
        sum = sum.add(&m.vec)?;
    }
    Ok(MaskedContext {
        vec: sum,
        arm: first.arm,
        round: first.round,
    })
}

const WITNESS_MAX_RETRIES: usize = 16;

/// Produce an alternative `(q2, x2)` explaining the same masked data:
/// `q2 x2 = q1 x1` with `x2` genuinely different from `x1`.
///
/// Draws a rotation `R` from `rng` and returns `q2 = q1 R`,
/// `x2 = R^T x1` (the transpose is the inverse for orthogonal `R`). For
/// `dim == 1` the only alternative is the sign flip, which is returned
/// directly. A rotation that leaves `x1` essentially unchanged is redrawn;
/// for nonzero `x1` this retry loop guarantees the returned `x2` differs
/// from `x1` in some entry by more than [`tolerances::WITNESS_DISTINCT`].
pub fn privacy_witness(
    q1: &Matrix,
    x1: &Vector,
    rng: &mut Rng,
) -> Result<(Matrix, Vector), O3mError> {
    let dim = x1.dim();
    if dim == 1 {
        return witness_with_rotation(q1, x1, &Matrix::from_rows(&[vec![-1.0]])?);
    }
    for _ in 0..WITNESS_MAX_RETRIES {
        let rotation = random_orthogonal(dim, rng)?;
        let (q2, x2) = witness_with_rotation(q1, x1, &rotation)?;
        let moved = x2.max_abs_diff(x1)? > tolerances::WITNESS_DISTINCT;
        if moved || x1.norm2() == 0.0 {
            return Ok((q2, x2));
        }
    }
    Err(O3mError::DegenerateWitness {
        attempts: WITNESS_MAX_RETRIES,
    })
}

/// The deterministic core of [`privacy_witness`] for a caller-chosen
/// orthogonal rotation.
pub fn witness_with_rotation(
    q1: &Matrix,
    x1: &Vector,
    rotation: &Matrix,
) -> Result<(Matrix, Vector), O3mError> {
    let q2 = q1.matmul(rotation)?;
    let x2 = rotation.transpose().matvec(x1)?;
    Ok((q2, x2))
}
