//! Linear contextual bandits in the vertical-federated setting.
//!
//! The crate provides:
//!
//! - [`numerics`]: dense matrix/vector kernels (random orthogonal matrices,
//!   Cholesky factorization, SPD solve/inverse, multivariate normal sampling)
//!   on top of a seeded, cross-platform [`numerics::Rng`].
//! - [`bandit`]: centralized LinUCB and LinTS over shared sufficient
//!   statistics `(lambda_mat, lambda_inv, u, theta_hat)`.
//! - [`o3m`]: the orthogonal-mask mechanism — column-partitioning a mask
//!   matrix across participants, masking local context slices, aggregating
//!   masked shares, and constructing indistinguishability witnesses.
//! - [`fedsim`]: the multi-participant protocol simulation (roles, typed
//!   messages, byte ledger) and the VFUCB/VFTS round loops, plus centralized
//!   and partial-information baselines.
//! - [`envs`]: reward-generating environments — a synthetic linear model and
//!   a logged-data replay evaluator with its ingestion pipeline.
//! - [`costs`]: analytical per-stage compute and communication cost models
//!   and relative-cost computation.
//! - [`io`]: the binary on-disk formats for matrices, mask shards, and replay
//!   log caches.
//!
//! All randomness flows through [`numerics::Rng`]; identical seeds produce
//! identical results across runs, which the protocol-equivalence tests rely
//! on.

pub mod bandit;
pub mod costs;
pub mod envs;
pub mod fedsim;
pub mod hashing;
pub mod io;
pub mod numerics;
pub mod o3m;
pub mod tolerances;
