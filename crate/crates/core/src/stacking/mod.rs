//! Stacked multi-label models.
//!
//! Level 0 holds one PU model per label on the raw features. Each further
//! level appends every label's out-of-fold prediction from the level below to
//! the feature vector and trains fresh per-label models on the wider input,
//! so a label's model can draw on evidence about the other labels. Inference
//! is a plain feed-forward pass through the levels.

mod cv;
mod io;
mod model;
mod train;

pub use cv::{cross_val_predictions, cross_val_predictions_traced, FoldRecord, LabelFolds};
pub use io::{load_model, save_model, MODEL_HEADER, WEIGHT_EPSILON};
pub use model::{predict_stacked, StackedModel, StackedPrediction};
pub use train::{model_seed, train_stacked, train_stacked_timed};

use crate::error::{Error, Result};
use crate::pu::{CEstimateConfig, SGDConfig};

/// Where each model's label frequency `c` comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CMode {
    /// Estimated separately for every label (and every fold model).
    PerLabel,
    /// One estimate pooled over the held-out positives of all labels.
    Global,
    /// Supplied by the caller; `1.0` gives plain logistic regression.
    Fixed(f64),
}

/// How a level's predictions are appended as features for the next level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Augmentation {
    /// The predicted probability.
    Probability,
    /// `+1` when the probability exceeds 0.5, else `-1`.
    HardSign,
}

impl Augmentation {
    pub fn apply(self, p: f64) -> f64 {
        match self {
            Augmentation::Probability => p,
            Augmentation::HardSign => {
                if p > 0.5 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Augmentation::Probability => "probability",
            Augmentation::HardSign => "hard-sign",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "probability" => Some(Augmentation::Probability),
            "hard-sign" => Some(Augmentation::HardSign),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StackConfig {
    /// Number of stacked levels above level 0.
    pub num_stack_levels: usize,
    /// Folds used for out-of-fold predictions.
    pub cv_folds: usize,
    pub sgd: SGDConfig,
    pub c_mode: CMode,
    pub c_estimate: CEstimateConfig,
    pub augmentation: Augmentation,
    /// Reuse the level-0 estimates of `c` at every level.
    pub freeze_c: bool,
    /// Root of every per-model seed.
    pub seed: u64,
}

impl Default for StackConfig {
    fn default() -> Self {
        StackConfig {
            num_stack_levels: 1,
            cv_folds: 5,
            sgd: SGDConfig::default(),
            c_mode: CMode::PerLabel,
            c_estimate: CEstimateConfig::default(),
            augmentation: Augmentation::Probability,
            freeze_c: false,
            seed: 42,
        }
    }
}

impl StackConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cv_folds < 2 {
            return Err(Error::InvalidConfig(format!(
                "need at least 2 cross-validation folds, got {}",
                self.cv_folds
            )));
        }
        if let CMode::Fixed(c) = self.c_mode {
            if !(c > 0.0 && c <= 1.0) {
                return Err(Error::InvalidConfig(format!("c = {c} outside (0, 1]")));
            }
        }
        self.sgd.validate()?;
        self.c_estimate.validate()
    }

    /// Flat (level-0 only) copy of this configuration.
    pub fn flat(&self) -> StackConfig {
        StackConfig {
            num_stack_levels: 0,
            ..self.clone()
        }
    }
}
