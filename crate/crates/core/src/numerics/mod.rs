//! Dense matrix/vector kernels shared by every other module.
//!
//! Everything here is pure given its inputs; [`Rng`] is single-owner mutable
//! state, so concurrent use requires independent `Rng` instances.

mod matrix;
mod rng;
mod vector;

pub use matrix::Matrix;
pub use rng::Rng;
pub use vector::Vector;

use crate::tolerances;
use thiserror::Error;

/// Errors from matrix/vector construction and factorizations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("dimension must be positive")]
    EmptyDimension,
    #[error("non-finite {context} at index {index}")]
    NonFinite { context: &'static str, index: usize },
    #[error("dimension mismatch in {context}: {left} vs {right}")]
    DimMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("matrix is not square: {rows} x {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (max asymmetry {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },
    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },
    #[error("degenerate random draw after {attempts} attempts")]
    DegenerateDraw { attempts: usize },
}

const ORTHOGONAL_MAX_RETRIES: usize = 8;

/// Generate a random `dim x dim` orthogonal matrix from `rng`.
///
/// Fills the matrix with standard-normal entries and orthonormalizes the
/// columns by modified Gram-Schmidt with a second projection pass per column
/// (classical single-pass Gram-Schmidt visibly loses orthogonality by
/// `dim = 100` in 64-bit floats). Column norms are positive by construction,
/// so the implicit triangular factor has a positive diagonal and the map
/// from seed to matrix is unique. A near-linearly-dependent draw is
/// discarded and retried with fresh entries, up to a bounded retry count.
pub fn random_orthogonal(dim: usize, rng: &mut Rng) -> Result<Matrix, NumericsError> {
    assert!(dim > 0, "dimension must be positive");
    for _ in 0..ORTHOGONAL_MAX_RETRIES {
        let mut q = Matrix::from_fn(dim, dim, |_, _| rng.standard_normal());
        if gram_schmidt_in_place(&mut q) {
            return Ok(q);
        }
    }
    Err(NumericsError::DegenerateDraw {
        attempts: ORTHOGONAL_MAX_RETRIES,
    })
}

/// Orthonormalize the columns of `q` in place. Returns false when a column
/// collapses to (numerically) zero after projection.
fn gram_schmidt_in_place(q: &mut Matrix) -> bool {
    let dim = q.rows();
    for j in 0..dim {
        let mut v = q.column(j);
        let original_norm = v.norm2();
        // Two projection passes: the second removes the O(eps) residue the
        // first leaves behind.
        for _ in 0..2 {
            for i in 0..j {
                let qi = q.column(i);
                let coeff = qi.dot(&v).expect("columns share dimension");
                v.axpy(-coeff, &qi).expect("columns share dimension");
            }
        }
        let norm = v.norm2();
        if !(norm > original_norm * 1e-10 && norm.is_finite()) {
            return false;
        }
        q.set_column(j, &v.scale(1.0 / norm))
            .expect("column dimension matches");
    }
    true
}

/// Lower-triangular Cholesky factor `L` with `L L^T = a`.
///
/// `a` must be square, symmetric within [`tolerances::SYMMETRY`] (scaled by
/// its magnitude), and positive definite; a non-positive pivot reports the
/// offending index.
pub fn cholesky(a: &Matrix) -> Result<Matrix, NumericsError> {
    if !a.is_square() {
        return Err(NumericsError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let asym = a.max_asymmetry();
    if asym > tolerances::SYMMETRY * a.max_abs().max(1.0) {
        return Err(NumericsError::NotSymmetric {
            max_asymmetry: asym,
        });
    }
    let dim = a.rows();
    let mut l = Matrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..=i {
            let mut sum = a.get(i, j);
            for k in 0..j {
                sum -= l.get(i, k) * l.get(j, k);
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(NumericsError::NotPositiveDefinite { pivot: i });
                }
                l.set(i, j, sum.sqrt());
            } else {
                l.set(i, j, sum / l.get(j, j));
            }
        }
    }
    Ok(l)
}

/// Solve `L y = b` for lower-triangular `L`.
fn forward_substitute(l: &Matrix, b: &Vector) -> Vector {
    let dim = l.rows();
    let mut y = Vector::zeros(dim);
    for i in 0..dim {
        let mut sum = b.get(i);
        for k in 0..i {
            sum -= l.get(i, k) * y.get(k);
        }
        y.set(i, sum / l.get(i, i));
    }
    y
}

/// Solve `L^T x = y` for lower-triangular `L`.
fn back_substitute_transposed(l: &Matrix, y: &Vector) -> Vector {
    let dim = l.rows();
    let mut x = Vector::zeros(dim);
    for i in (0..dim).rev() {
        let mut sum = y.get(i);
        for k in (i + 1)..dim {
            sum -= l.get(k, i) * x.get(k);
        }
        x.set(i, sum / l.get(i, i));
    }
    x
}

/// Solve `a x = b` through an existing Cholesky factor of `a`.
fn cholesky_solve(l: &Matrix, b: &Vector) -> Vector {
    back_substitute_transposed(l, &forward_substitute(l, b))
}

// Condition estimate (ratio of extreme Cholesky pivots, squared) below which
// a plain factored solve already meets SPD_INVERSE_RESIDUAL and the residual
// check is skipped.
const REFINEMENT_CONDITION_CUTOFF: f64 = 1e6;

/// Inverse of a symmetric positive definite matrix.
///
/// Factors once, solves per unit column, and applies one step of iterative
/// refinement to columns whose residual exceeds a tenth of
/// [`tolerances::SPD_INVERSE_RESIDUAL`]. The refinement pass keeps
/// `max-abs(a * inv(a) - I)` within tolerance for condition numbers up to
/// 1e8. The result is symmetrized before returning.
pub fn spd_inverse(a: &Matrix) -> Result<Matrix, NumericsError> {
    let l = cholesky(a)?;
    let dim = a.rows();
    let mut min_pivot = f64::INFINITY;
    let mut max_pivot: f64 = 0.0;
    for i in 0..dim {
        min_pivot = min_pivot.min(l.get(i, i));
        max_pivot = max_pivot.max(l.get(i, i));
    }
    let condition_estimate = (max_pivot / min_pivot).powi(2);
    let check_residuals = condition_estimate >= REFINEMENT_CONDITION_CUTOFF;

    let mut inv = Matrix::zeros(dim, dim);
    for col in 0..dim {
        let e = Vector::basis(dim, col);
        let mut x = cholesky_solve(&l, &e);
        if check_residuals {
            for _ in 0..2 {
                let residual = e.sub(&a.matvec(&x).expect("square solve"))?;
                if residual.max_abs() <= 0.1 * tolerances::SPD_INVERSE_RESIDUAL {
                    break;
                }
                let correction = cholesky_solve(&l, &residual);
                x = x.add(&correction)?;
            }
        }
        inv.set_column(col, &x)?;
    }
    inv.symmetrize();
    Ok(inv)
}

/// Draw `mean + cov_factor * z` where `z` is standard normal.
///
/// `cov_factor` is any matrix `A` with `A A^T` equal to the intended
/// covariance; it need not be square. Deterministic given the `rng` seed.
pub fn mvn_sample(
    mean: &Vector,
    cov_factor: &Matrix,
    rng: &mut Rng,
) -> Result<Vector, NumericsError> {
    let z = rng.standard_normal_vector(cov_factor.cols());
    mvn_from_z(mean, cov_factor, &z)
}

/// The deterministic half of [`mvn_sample`]: `mean + cov_factor * z` for a
/// caller-supplied standard-normal vector. Exposed so two runs can be
/// coupled on the same draw.
pub fn mvn_from_z(
    mean: &Vector,
    cov_factor: &Matrix,
    z: &Vector,
) -> Result<Vector, NumericsError> {
    if cov_factor.rows() != mean.dim() {
        return Err(NumericsError::DimMismatch {
            context: "mvn mean vs factor rows",
            left: mean.dim(),
            right: cov_factor.rows(),
        });
    }
    mean.add(&cov_factor.matvec(z)?)
}
