use super::SparseVector;
use crate::error::{Error, Result};

/// One instance's label assignment over q labels; `true` is +1, `false` is -1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabelVector(Vec<bool>);

impl LabelVector {
    pub fn new(bits: Vec<bool>) -> Self {
        LabelVector(bits)
    }

    pub fn negative(num_labels: usize) -> Self {
        LabelVector(vec![false; num_labels])
    }

    /// Label vector of length `num_labels` with +1 at the given 0-based labels.
    pub fn from_positives(num_labels: usize, positives: &[usize]) -> Result<Self> {
        let mut bits = vec![false; num_labels];
        for &k in positives {
            if k >= num_labels {
                return Err(Error::InvalidConfig(format!(
                    "label {k} out of range for {num_labels} labels"
                )));
            }
            bits[k] = true;
        }
        Ok(LabelVector(bits))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_positive(&self, k: usize) -> bool {
        self.0[k]
    }

    /// The label as +1 / -1.
    pub fn value(&self, k: usize) -> i8 {
        if self.0[k] {
            1
        } else {
            -1
        }
    }

    pub fn set(&mut self, k: usize, positive: bool) {
        self.0[k] = positive;
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    /// 0-based indices of the +1 labels.
    pub fn positives(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &b)| b).map(|(k, _)| k)
    }

    pub fn count_positive(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }
}

/// Sparse instances with their observed (possibly incomplete) label sets.
///
/// `ground_truth`, when present, holds the complete label sets the observed
/// ones were derived from; every observed +1 is also a ground-truth +1.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiLabelDataset {
    num_features: usize,
    num_labels: usize,
    instances: Vec<SparseVector>,
    observed: Vec<LabelVector>,
    ground_truth: Option<Vec<LabelVector>>,
}

impl MultiLabelDataset {
    pub fn new(
        num_features: usize,
        num_labels: usize,
        instances: Vec<SparseVector>,
        observed: Vec<LabelVector>,
        ground_truth: Option<Vec<LabelVector>>,
    ) -> Result<Self> {
        if instances.len() != observed.len() {
            return Err(Error::InvalidConfig(format!(
                "{} instances but {} label vectors",
                instances.len(),
                observed.len()
            )));
        }
        for (i, x) in instances.iter().enumerate() {
            if x.max_index() > num_features {
                return Err(Error::InvalidConfig(format!(
                    "instance {i} has feature {} beyond dimension {num_features}",
                    x.max_index()
                )));
            }
        }
        for (i, s) in observed.iter().enumerate() {
            if s.len() != num_labels {
                return Err(Error::InvalidConfig(format!(
                    "instance {i} has {} labels, expected {num_labels}",
                    s.len()
                )));
            }
        }
        if let Some(truth) = &ground_truth {
            if truth.len() != observed.len() {
                return Err(Error::InvalidConfig(
                    "ground truth and observed labels differ in length".into(),
                ));
            }
            for (i, (s, y)) in observed.iter().zip(truth).enumerate() {
                if y.len() != num_labels {
                    return Err(Error::InvalidConfig(format!(
                        "ground truth for instance {i} has {} labels",
                        y.len()
                    )));
                }
                if let Some(k) = s.positives().find(|&k| !y.is_positive(k)) {
                    return Err(Error::InvalidConfig(format!(
                        "instance {i} label {k} is observed positive but negative in the ground truth"
                    )));
                }
            }
        }
        Ok(MultiLabelDataset {
            num_features,
            num_labels,
            instances,
            observed,
            ground_truth,
        })
    }

    pub fn num_instances(&self) -> usize {
        self.instances.len()
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    pub fn num_features(&self) -> usize {
        self.num_features
    }

    pub fn instances(&self) -> &[SparseVector] {
        &self.instances
    }

    pub fn observed_labels(&self) -> &[LabelVector] {
        &self.observed
    }

    pub fn ground_truth(&self) -> Option<&[LabelVector]> {
        self.ground_truth.as_deref()
    }

    /// The most complete labels available: ground truth if present, else observed.
    pub fn truth(&self) -> &[LabelVector] {
        self.ground_truth.as_deref().unwrap_or(&self.observed)
    }

    /// Observed labels of label `k` for every instance, `true` meaning +1.
    pub fn label_column(&self, k: usize) -> Vec<bool> {
        self.observed.iter().map(|s| s.is_positive(k)).collect()
    }

    /// Total number of observed +1 entries.
    pub fn observed_positive_count(&self) -> usize {
        self.observed.iter().map(LabelVector::count_positive).sum()
    }

    pub fn total_nnz(&self) -> usize {
        self.instances.iter().map(SparseVector::nnz).sum()
    }

    /// New dataset holding the given rows in the given order.
    pub fn subset(&self, rows: &[usize]) -> MultiLabelDataset {
        MultiLabelDataset {
            num_features: self.num_features,
            num_labels: self.num_labels,
            instances: rows.iter().map(|&i| self.instances[i].clone()).collect(),
            observed: rows.iter().map(|&i| self.observed[i].clone()).collect(),
            ground_truth: self
                .ground_truth
                .as_ref()
                .map(|t| rows.iter().map(|&i| t[i].clone()).collect()),
        }
    }

    /// Copy whose observed labels are replaced by [`truth`](Self::truth).
    pub fn fully_observed(&self) -> MultiLabelDataset {
        let truth = self.truth().to_vec();
        MultiLabelDataset {
            num_features: self.num_features,
            num_labels: self.num_labels,
            instances: self.instances.clone(),
            observed: truth.clone(),
            ground_truth: Some(truth),
        }
    }

    /// Copy with a raised feature dimension (existing features unchanged).
    pub fn with_num_features(&self, num_features: usize) -> Result<MultiLabelDataset> {
        MultiLabelDataset::new(
            num_features,
            self.num_labels,
            self.instances.clone(),
            self.observed.clone(),
            self.ground_truth.clone(),
        )
    }
}
