use rayon::prelude::*;

use super::Augmentation;
use crate::data::{LabelVector, MultiLabelDataset, SparseVector};
use crate::error::{Error, Result};
use crate::pu::PUBinaryModel;

/// Trained levels of per-label models; level `l` expects `D + l*q` features.
#[derive(Debug, Clone, PartialEq)]
pub struct StackedModel {
    num_labels: usize,
    base_features: usize,
    augmentation: Augmentation,
    levels: Vec<Vec<PUBinaryModel>>,
}

impl StackedModel {
    pub fn new(
        num_labels: usize,
        base_features: usize,
        augmentation: Augmentation,
        levels: Vec<Vec<PUBinaryModel>>,
    ) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidConfig("a stacked model needs level 0".into()));
        }
        for (l, level) in levels.iter().enumerate() {
            if level.len() != num_labels {
                return Err(Error::InvalidConfig(format!(
                    "level {l} has {} models for {num_labels} labels",
                    level.len()
                )));
            }
            let dim = base_features + l * num_labels;
            if let Some(m) = level.iter().find(|m| m.num_features() != dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.num_features(),
                });
            }
        }
        Ok(StackedModel {
            num_labels,
            base_features,
            augmentation,
            levels,
        })
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    pub fn base_features(&self) -> usize {
        self.base_features
    }

    pub fn augmentation(&self) -> Augmentation {
        self.augmentation
    }

    /// Stacked levels above level 0.
    pub fn num_stack_levels(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[Vec<PUBinaryModel>] {
        &self.levels
    }

    /// Label frequencies of the final level's models.
    pub fn final_c(&self) -> Vec<f64> {
        self.levels
            .last()
            .map(|l| l.iter().map(PUBinaryModel::label_frequency_c).collect())
            .unwrap_or_default()
    }

    pub fn predict(&self, x: &SparseVector, threshold: f64) -> Result<StackedPrediction> {
        predict_stacked(self, x, threshold)
    }

    /// Predictions for every instance of `ds`, in order.
    pub fn predict_dataset(
        &self,
        ds: &MultiLabelDataset,
        threshold: f64,
    ) -> Result<Vec<StackedPrediction>> {
        ds.instances()
            .par_iter()
            .map(|x| predict_stacked(self, x, threshold))
            .collect()
    }
}

/// Output of [`predict_stacked`].
#[derive(Debug, Clone, PartialEq)]
pub struct StackedPrediction {
    /// Per-level label probabilities; the last entry is the final output.
    pub levels: Vec<Vec<f64>>,
    /// +1 where the final probability is strictly above the threshold.
    pub labels: LabelVector,
}

impl StackedPrediction {
    pub fn probabilities(&self) -> &[f64] {
        self.levels.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Feed-forward inference through all levels.
pub fn predict_stacked(
    model: &StackedModel,
    x: &SparseVector,
    threshold: f64,
) -> Result<StackedPrediction> {
    if x.max_index() > model.base_features {
        return Err(Error::DimensionMismatch {
            expected: model.base_features,
            found: x.max_index(),
        });
    }
    let q = model.num_labels;
    let mut outputs: Vec<Vec<f64>> = Vec::with_capacity(model.levels.len());
    let mut input = x.clone();
    for (l, level) in model.levels.iter().enumerate() {
        if l > 0 {
            let prev = &outputs[l - 1];
            let aug: Vec<f64> = prev.iter().map(|&p| model.augmentation.apply(p)).collect();
            input = input.extended(model.base_features + (l - 1) * q, &aug)?;
        }
        let probs: Vec<f64> = level.iter().map(|m| m.predict_proba(&input)).collect();
        if probs.iter().any(|p| !p.is_finite()) {
            return Err(Error::Divergence(format!("non-finite prediction at level {l}")));
        }
        outputs.push(probs);
    }
    let last = outputs.last().expect("at least one level");
    let labels = LabelVector::new(last.iter().map(|&p| p > threshold).collect());
    Ok(StackedPrediction {
        levels: outputs,
        labels,
    })
}
