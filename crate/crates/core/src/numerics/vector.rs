use super::NumericsError;

/// Dense vector of 64-bit floats.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    entries: Vec<f64>,
}

impl Vector {
    /// Build from raw entries, rejecting empty or non-finite input.
    pub fn from_entries(entries: Vec<f64>) -> Result<Self, NumericsError> {
        if entries.is_empty() {
            return Err(NumericsError::EmptyDimension);
        }
        if let Some(i) = entries.iter().position(|e| !e.is_finite()) {
            return Err(NumericsError::NonFinite {
                context: "vector entry",
                index: i,
            });
        }
        Ok(Self { entries })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "vector dimension must be positive");
        Self {
            entries: vec![0.0; dim],
        }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize) -> f64) -> Self {
        assert!(dim > 0, "vector dimension must be positive");
        Self {
            entries: (0..dim).map(f).collect(),
        }
    }

    /// Standard basis vector `e_i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[i] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.entries[i]
    }

    pub fn set(&mut self, i: usize, value: f64) {
        self.entries[i] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.entries.iter()
    }

    pub fn dot(&self, other: &Self) -> Result<f64, NumericsError> {
        self.check_dim(other.dim())?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * b)
            .sum())
    }

    pub fn norm2(&self) -> f64 {
        self.entries.iter().map(|e| e * e).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64, NumericsError> {
        self.check_dim(other.dim())?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    pub fn add(&self, other: &Self) -> Result<Self, NumericsError> {
        self.check_dim(other.dim())?;
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, NumericsError> {
        self.check_dim(other.dim())?;
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    /// `self += factor * other`.
    pub fn axpy(&mut self, factor: f64, other: &Self) -> Result<(), NumericsError> {
        self.check_dim(other.dim())?;
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += factor * b;
        }
        Ok(())
    }

    /// Scale in place to unit Euclidean norm. Errors on the zero vector.
    pub fn normalize(&mut self) -> Result<(), NumericsError> {
        let n = self.norm2();
        if n == 0.0 || !n.is_finite() {
            return Err(NumericsError::DegenerateDraw { attempts: 0 });
        }
        for e in &mut self.entries {
            *e /= n;
        }
        Ok(())
    }

    /// New vector containing `self[coords]` in the given order.
    pub fn gather(&self, coords: &[usize]) -> Result<Self, NumericsError> {
        if coords.is_empty() {
            return Err(NumericsError::EmptyDimension);
        }
        let mut entries = Vec::with_capacity(coords.len());
        for &c in coords {
            if c >= self.dim() {
                return Err(NumericsError::IndexOutOfRange {
                    index: c,
                    dim: self.dim(),
                });
            }
            entries.push(self.entries[c]);
        }
        Ok(Self { entries })
    }

    fn check_dim(&self, other: usize) -> Result<(), NumericsError> {
        if self.dim() != other {
            return Err(NumericsError::DimMismatch {
                context: "vector operands",
                left: self.dim(),
                right: other,
            });
        }
        Ok(())
    }
}
