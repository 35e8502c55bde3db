use super::loss::sigmoid;
use crate::data::SparseVector;
use crate::error::{Error, Result};

/// One label's logistic model and the label frequency `c` it was trained with.
#[derive(Debug, Clone, PartialEq)]
pub struct PUBinaryModel {
    weights: Vec<f64>,
    bias: f64,
    label_frequency_c: f64,
}

impl PUBinaryModel {
    pub fn new(weights: Vec<f64>, bias: f64, label_frequency_c: f64) -> Result<Self> {
        if !(label_frequency_c > 0.0 && label_frequency_c <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "label frequency {label_frequency_c} outside (0, 1]"
            )));
        }
        if !bias.is_finite() || weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Divergence("model has non-finite parameters".into()));
        }
        Ok(PUBinaryModel {
            weights,
            bias,
            label_frequency_c,
        })
    }

    pub fn zeros(num_features: usize, label_frequency_c: f64) -> Result<Self> {
        Self::new(vec![0.0; num_features], 0.0, label_frequency_c)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn label_frequency_c(&self) -> f64 {
        self.label_frequency_c
    }

    pub fn num_features(&self) -> usize {
        self.weights.len()
    }

    /// `w.x + b`. Panics if `x` has an index beyond the model dimension.
    pub fn score(&self, x: &SparseVector) -> f64 {
        x.dot(&self.weights) + self.bias
    }

    /// Estimated probability that the label truly applies to `x`.
    pub fn predict_proba(&self, x: &SparseVector) -> f64 {
        sigmoid(self.score(x))
    }

    /// Like [`predict_proba`](Self::predict_proba) but rejects out-of-range features.
    pub fn try_predict_proba(&self, x: &SparseVector) -> Result<f64> {
        if x.max_index() > self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                found: x.max_index(),
            });
        }
        Ok(self.predict_proba(x))
    }
}
