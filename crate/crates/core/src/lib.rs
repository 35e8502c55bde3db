//! Multi-label learning from incomplete label assignments.
//!
//! Each label gets a logistic model trained with a positive-unlabeled loss
//! (annotated positives are trusted, unannotated entries may still be true
//! positives), and optional stacked levels feed cross-validated predictions
//! of every label back in as extra features so later levels can exploit label
//! correlations.
//!
//! * [`data`]: sparse instances, multi-label datasets, the text format, masking.
//! * [`pu`]: the PU logistic loss, its gradient, SGD training, label-frequency estimation.
//! * [`stacking`]: stacked training and inference, out-of-fold predictions, model files.
//! * [`eval`]: Micro-F1, synthetic data, missing-rate experiments, scaling benchmarks.
//! * [`cli`]: the `smile` command-line tool.

pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod pu;
pub mod seed;
pub mod stacking;

pub use data::{LabelVector, MaskSpec, MultiLabelDataset, SparseVector};
pub use error::{Error, Result};
pub use eval::EvalReport;
pub use pu::{CEstimateConfig, LearningRate, PUBinaryModel, SGDConfig};
pub use stacking::{Augmentation, CMode, StackConfig, StackedModel};
