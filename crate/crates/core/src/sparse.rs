use crate::error::{Error, Result};

/// Sparse real vector with strictly increasing indices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    dim: usize,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl SparseVector {
    pub fn zeros(dim: usize) -> Self {
        SparseVector {
            dim,
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds a vector from `(index, value)` pairs; zero values are dropped.
    pub fn from_pairs(dim: usize, pairs: impl IntoIterator<Item = (u32, f64)>) -> Result<Self> {
        let mut pairs: Vec<(u32, f64)> = pairs.into_iter().filter(|&(_, v)| v != 0.0).collect();
        pairs.sort_by_key(|&(i, _)| i);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument("duplicate sparse index".into()));
        }
        if let Some(&(last, _)) = pairs.last() {
            if last as usize >= dim {
                return Err(Error::IndexOutOfRange {
                    index: last as usize,
                    len: dim,
                });
            }
        }
        let (indices, values) = pairs.into_iter().unzip();
        Ok(SparseVector {
            dim,
            indices,
            values,
        })
    }

    pub fn from_dense(values: &[f64]) -> Self {
        let mut v = SparseVector::zeros(values.len());
        for (i, &x) in values.iter().enumerate() {
            if x != 0.0 {
                v.indices.push(i as u32);
                v.values.push(x);
            }
        }
        v
    }

    /// Appends an entry; `index` must exceed every stored index.
    pub(crate) fn push(&mut self, index: u32, value: f64) {
        debug_assert!(self.indices.last().is_none_or(|&last| last < index));
        debug_assert!((index as usize) < self.dim);
        if value != 0.0 {
            self.indices.push(index);
            self.values.push(value);
        }
    }

    pub(crate) fn with_dim(dim: usize, capacity: usize) -> Self {
        SparseVector {
            dim,
            indices: Vec::with_capacity(capacity),
            values: Vec::with_capacity(capacity),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn get(&self, index: usize) -> f64 {
        match self.indices.binary_search(&(index as u32)) {
            Ok(pos) => self.values[pos],
            Err(_) => 0.0,
        }
    }

    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.iter().map(|(i, v)| v * dense[i as usize]).sum()
    }

    pub fn scaled(&self, factor: f64) -> SparseVector {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= factor);
        if factor == 0.0 {
            out.indices.clear();
            out.values.clear();
        }
        out
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, v) in self.iter() {
            out[i as usize] = v;
        }
        out
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_pairs_sorts_and_drops_zeros() {
        let v = SparseVector::from_pairs(5, [(3, 1.0), (0, 2.0), (1, 0.0)]).unwrap();
        assert_eq!(v.indices(), [0, 3]);
        assert_eq!(v.to_dense(), vec![2.0, 0.0, 0.0, 1.0, 0.0]);
        assert_eq!(v.get(3), 1.0);
        assert_eq!(v.get(4), 0.0);
    }

    #[test]
    fn from_pairs_rejects_bad_input() {
        assert!(SparseVector::from_pairs(2, [(2, 1.0)]).is_err());
        assert!(SparseVector::from_pairs(4, [(1, 1.0), (1, 2.0)]).is_err());
    }

    #[test]
    fn dense_round_trip() {
        let dense = vec![0.0, 1.5, 0.0, -2.0];
        assert_eq!(SparseVector::from_dense(&dense).to_dense(), dense);
        assert_eq!(SparseVector::from_dense(&dense).dot_dense(&[1.0, 2.0, 3.0, 4.0]), -5.0);
    }
}
