//! Repo-wide numeric tolerances.
//!
//! Every tolerance used by the library and its verification suites lives
//! here, so a bound is never re-derived (or silently loosened) at a call
//! site. Norms written `max-abs` are entrywise maximum absolute values.

/// Max-abs bound on `Q^T Q - I` and `Q Q^T - I` for a generated orthogonal
/// matrix, for dimensions up to 256.
pub const ORTHOGONALITY: f64 = 1e-10;

/// Relative max-abs bound on `L L^T - A` for a Cholesky factorization,
/// scaled by the max-abs of `A`.
pub const CHOLESKY_RECONSTRUCTION_REL: f64 = 1e-9;

/// Max-abs bound on `A * inv(A) - I` for SPD inversion, valid for condition
/// numbers up to 1e8.
pub const SPD_INVERSE_RESIDUAL: f64 = 1e-8;

/// Absolute asymmetry (`|a_ij - a_ji|`) tolerated before a matrix is
/// rejected as non-symmetric.
pub const SYMMETRY: f64 = 1e-12;

/// Relative bound on norm change under multiplication by an orthogonal
/// matrix: `| ||Qx|| - ||x|| | <= NORM_PRESERVATION_REL * ||x||`.
pub const NORM_PRESERVATION_REL: f64 = 1e-9;

/// Most-negative radicand accepted (and clamped to zero) when computing the
/// UCB exploration bonus `sqrt(x^T inv(lambda_mat) x)`. Anything below this
/// signals corrupted state and is a hard error.
pub const RADICAND_CLAMP: f64 = -1e-12;

/// Relative tolerance for federated-vs-centralized score agreement in the
/// protocol losslessness checks.
pub const LOSSLESS_REL: f64 = 1e-8;

/// Absolute tie window for arm selection: values within this of the maximum
/// count as tied and the smallest tied index wins. Roundoff-level
/// differences (masking a context changes its scores by ~1e-13) therefore
/// never flip a decision, which is what lets a masked run reproduce its
/// centralized counterpart arm for arm. Kept absolute so selection is
/// invariant under shifting all values by a constant.
pub const ARM_TIE: f64 = 1e-9;

/// Max-abs bound on `Q2 x2 - Q1 x1` for a privacy witness pair.
pub const WITNESS: f64 = 1e-9;

/// Minimum entrywise separation required between witness raw data `x2` and
/// the original `x1` for the pair to count as genuinely distinct.
pub const WITNESS_DISTINCT: f64 = 1e-6;

/// Tolerance on the closed-form ridge-estimator identity
/// `theta_hat = inv(lambda_mat) u` recomputed from a full history.
pub const ESTIMATOR_RECOMPUTE: f64 = 1e-8;

/// Unit-norm check tolerance (synthetic contexts and reward parameters).
pub const UNIT_NORM: f64 = 1e-12;
