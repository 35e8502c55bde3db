use crate::error::{Error, Result};

/// One instance's features as `(index, value)` pairs.
///
/// Indices are 1-based and strictly increasing; zero values are never stored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    /// Builds a vector from `(index, value)` pairs, dropping zero values.
    pub fn new(entries: Vec<(usize, f64)>) -> Result<Self> {
        let mut prev = 0usize;
        for &(idx, value) in &entries {
            if idx == 0 {
                return Err(Error::InvalidConfig("feature indices are 1-based".into()));
            }
            if idx <= prev {
                return Err(Error::InvalidConfig(format!(
                    "feature index {idx} does not increase past {prev}"
                )));
            }
            if !value.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "non-finite value {value} at feature {idx}"
                )));
            }
            prev = idx;
        }
        let entries = entries.into_iter().filter(|&(_, v)| v != 0.0).collect();
        Ok(SparseVector { entries })
    }

    /// Sparse view of a dense vector; position `j` becomes index `j + 1`.
    pub fn from_dense(values: &[f64]) -> Self {
        SparseVector {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .map(|(j, &v)| (j + 1, v))
                .collect(),
        }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest feature index present, 0 for an empty vector.
    pub fn max_index(&self) -> usize {
        self.entries.last().map_or(0, |&(idx, _)| idx)
    }

    /// Dot product with a dense weight vector indexed from 0.
    ///
    /// Panics if an index exceeds `weights.len()`.
    pub fn dot(&self, weights: &[f64]) -> f64 {
        self.entries
            .iter()
            .map(|&(idx, v)| weights[idx - 1] * v)
            .sum()
    }

    /// Copy with `values` appended at indices `offset+1..=offset+len`.
    pub fn extended(&self, offset: usize, values: &[f64]) -> Result<Self> {
        if self.max_index() > offset {
            return Err(Error::DimensionMismatch {
                expected: offset,
                found: self.max_index(),
            });
        }
        let mut entries = Vec::with_capacity(self.entries.len() + values.len());
        entries.extend_from_slice(&self.entries);
        for (j, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "non-finite augmentation value {v}"
                )));
            }
            if v != 0.0 {
                entries.push((offset + j + 1, v));
            }
        }
        Ok(SparseVector { entries })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_entries() {
        assert!(SparseVector::new(vec![(0, 1.0)]).is_err());
        assert!(SparseVector::new(vec![(2, 1.0), (2, 1.0)]).is_err());
        assert!(SparseVector::new(vec![(3, 1.0), (2, 1.0)]).is_err());
        assert!(SparseVector::new(vec![(1, f64::NAN)]).is_err());
        assert!(SparseVector::new(vec![(1, f64::INFINITY)]).is_err());
    }

    #[test]
    fn zeros_are_dropped() {
        let x = SparseVector::new(vec![(1, 0.0), (4, 2.5)]).unwrap();
        assert_eq!(x.entries(), &[(4, 2.5)]);
        assert_eq!(SparseVector::from_dense(&[0.0, 1.0, 0.0]).entries(), &[(2, 1.0)]);
    }

    #[test]
    fn dot_uses_one_based_indices() {
        let x = SparseVector::new(vec![(1, 2.0), (3, -1.0)]).unwrap();
        assert_eq!(x.dot(&[0.5, 100.0, 4.0]), 1.0 - 4.0);
    }
}
