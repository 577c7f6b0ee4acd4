use super::{NumericsError, Vector};

/// Dense row-major matrix of 64-bit floats.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl Matrix {
    /// Build from a row-major entry buffer, rejecting shape mismatches and
    /// non-finite values.
    pub fn from_row_major(
        rows: usize,
        cols: usize,
        entries: Vec<f64>,
    ) -> Result<Self, NumericsError> {
        if rows == 0 || cols == 0 {
            return Err(NumericsError::EmptyDimension);
        }
        if entries.len() != rows * cols {
            return Err(NumericsError::DimMismatch {
                context: "row-major buffer length",
                left: rows * cols,
                right: entries.len(),
            });
        }
        if let Some(i) = entries.iter().position(|e| !e.is_finite()) {
            return Err(NumericsError::NonFinite {
                context: "matrix entry",
                index: i,
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    /// Build from nested rows; every row must have the same length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, NumericsError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(NumericsError::EmptyDimension);
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(NumericsError::DimMismatch {
                context: "ragged rows",
                left: cols,
                right: rows.iter().map(Vec::len).find(|&l| l != cols).unwrap_or(0),
            });
        }
        Self::from_row_major(rows.len(), cols, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            entries: vec![0.0; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.entries[i * dim + i] = 1.0;
        }
        m
    }

    /// `factor * I`.
    pub fn scaled_identity(dim: usize, factor: f64) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.entries[i * dim + i] = factor;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.entries[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.entries[i * self.cols + j] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector::from_fn(self.rows, |i| self.get(i, j))
    }

    pub fn set_column(&mut self, j: usize, v: &Vector) -> Result<(), NumericsError> {
        if v.dim() != self.rows {
            return Err(NumericsError::DimMismatch {
                context: "set_column",
                left: self.rows,
                right: v.dim(),
            });
        }
        for i in 0..self.rows {
            self.set(i, j, v.get(i));
        }
        Ok(())
    }

    /// Columns `[start, end)` as a new `rows x (end - start)` matrix.
    pub fn column_block(&self, start: usize, end: usize) -> Result<Self, NumericsError> {
        if start >= end || end > self.cols {
            return Err(NumericsError::IndexOutOfRange {
                index: end,
                dim: self.cols,
            });
        }
        Ok(Self::from_fn(self.rows, end - start, |i, j| {
            self.get(i, start + j)
        }))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matvec(&self, x: &Vector) -> Result<Vector, NumericsError> {
        if x.dim() != self.cols {
            return Err(NumericsError::DimMismatch {
                context: "matvec",
                left: self.cols,
                right: x.dim(),
            });
        }
        let xs = x.as_slice();
        Ok(Vector::from_fn(self.rows, |i| {
            self.row(i).iter().zip(xs).map(|(a, b)| a * b).sum()
        }))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, NumericsError> {
        if self.cols != other.rows {
            return Err(NumericsError::DimMismatch {
                context: "matmul",
                left: self.cols,
                right: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let out_row = &mut out.entries[i * out.cols..(i + 1) * out.cols];
                for (o, b) in out_row.iter_mut().zip(orow) {
                    *o += aik * b;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self, NumericsError> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a += b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, NumericsError> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a -= b;
        }
        Ok(out)
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e *= factor;
        }
        out
    }

    /// Rank-1 update `self += factor * x x^T` (square matrices only).
    pub fn add_outer(&mut self, factor: f64, x: &Vector) -> Result<(), NumericsError> {
        if !self.is_square() || x.dim() != self.rows {
            return Err(NumericsError::DimMismatch {
                context: "add_outer",
                left: self.rows,
                right: x.dim(),
            });
        }
        let xs = x.as_slice();
        for i in 0..self.rows {
            let fi = factor * xs[i];
            let row = &mut self.entries[i * self.cols..(i + 1) * self.cols];
            for (r, xj) in row.iter_mut().zip(xs) {
                *r += fi * xj;
            }
        }
        Ok(())
    }

    /// Entrywise maximum absolute value.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64, NumericsError> {
        self.check_same_shape(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Entrywise max-abs of `self - I`.
    pub fn max_abs_diff_identity(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let target = if i == j { 1.0 } else { 0.0 };
                m = m.max((self.get(i, j) - target).abs());
            }
        }
        m
    }

    /// Largest `|a_ij - a_ji|` over all pairs (0 for non-square shapes never
    /// reaches here; caller checks squareness first).
    pub fn max_asymmetry(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                m = m.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        m
    }

    pub fn is_symmetric_within(&self, tol: f64) -> bool {
        self.is_square() && self.max_asymmetry() <= tol
    }

    /// Average `a_ij` and `a_ji` in place, restoring exact symmetry.
    pub fn symmetrize(&mut self) {
        debug_assert!(self.is_square());
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let avg = 0.5 * (self.get(i, j) + self.get(j, i));
                self.set(i, j, avg);
                self.set(j, i, avg);
            }
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<(), NumericsError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(NumericsError::ShapeMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_validates_shape_and_finiteness() {
        assert!(Matrix::from_row_major(2, 2, vec![1.0; 3]).is_err());
        assert!(Matrix::from_row_major(2, 2, vec![1.0, 2.0, f64::NAN, 4.0]).is_err());
        assert!(Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn matmul_and_matvec() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let ab = a.matmul(&b).unwrap();
        assert_eq!(ab.as_slice(), &[2.0, 1.0, 4.0, 3.0]);
        let x = Vector::from_entries(vec![1.0, -1.0]).unwrap();
        assert_eq!(a.matvec(&x).unwrap().as_slice(), &[-1.0, -1.0]);
    }

    #[test]
    fn column_block_slices_contiguous_columns() {
        let m = Matrix::from_fn(3, 4, |i, j| (i * 4 + j) as f64);
        let b = m.column_block(1, 3).unwrap();
        assert_eq!(b.rows(), 3);
        assert_eq!(b.cols(), 2);
        assert_eq!(b.row(0), &[1.0, 2.0]);
        assert_eq!(b.row(2), &[9.0, 10.0]);
        assert!(m.column_block(2, 2).is_err());
        assert!(m.column_block(3, 5).is_err());
    }

    #[test]
    fn add_outer_is_rank_one_update() {
        let mut m = Matrix::identity(2);
        let x = Vector::from_entries(vec![1.0, 2.0]).unwrap();
        m.add_outer(1.0, &x).unwrap();
        assert_eq!(m.as_slice(), &[2.0, 2.0, 2.0, 5.0]);
    }

    #[test]
    fn symmetry_helpers() {
        let mut m = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.5, 1.0]]).unwrap();
        assert!(!m.is_symmetric_within(0.4));
        m.symmetrize();
        assert_eq!(m.get(0, 1), 2.25);
        assert_eq!(m.get(1, 0), 2.25);
    }
}
