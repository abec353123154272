use crate::num::Scalar;

use super::MlError;

/// Column-major training data.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    columns: Vec<Vec<T>>,
    target: Vec<T>,
}

impl<T: Scalar> Dataset<T> {
    pub fn from_rows(rows: &[Vec<T>], target: Vec<T>) -> Result<Self, MlError> {
        if rows.len() != target.len() {
            return Err(MlError::DimensionMismatch { expected: rows.len(), found: target.len() });
        }
        let p = rows.first().map_or(0, Vec::len);
        let mut columns = vec![Vec::with_capacity(rows.len()); p];
        for row in rows {
            if row.len() != p {
                return Err(MlError::DimensionMismatch { expected: p, found: row.len() });
            }
            for (c, v) in row.iter().enumerate() {
                columns[c].push(*v);
            }
        }
        Ok(Self { columns, target })
    }

    pub fn from_columns(columns: Vec<Vec<T>>, target: Vec<T>) -> Result<Self, MlError> {
        for c in &columns {
            if c.len() != target.len() {
                return Err(MlError::DimensionMismatch { expected: target.len(), found: c.len() });
            }
        }
        Ok(Self { columns, target })
    }

    pub fn n_rows(&self) -> usize {
        self.target.len()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, feature: usize) -> &[T] {
        &self.columns[feature]
    }

    pub fn target(&self) -> &[T] {
        &self.target
    }

    pub fn value(&self, row: usize, feature: usize) -> T {
        self.columns[feature][row]
    }

    pub fn row(&self, row: usize) -> Vec<T> {
        self.columns.iter().map(|c| c[row]).collect()
    }

    /// Replaces one column; used to apply per-feature transforms.
    pub fn map_column(&self, feature: usize, f: impl Fn(T) -> T) -> Self {
        let mut out = self.clone();
        out.columns[feature] = out.columns[feature].iter().map(|&v| f(v)).collect();
        out
    }

    /// Reorders feature columns: new column `i` is old column `order[i]`.
    pub fn permute_columns(&self, order: &[usize]) -> Self {
        Self { columns: order.iter().map(|&i| self.columns[i].clone()).collect(), target: self.target.clone() }
    }
}
