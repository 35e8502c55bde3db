//! Per-label positive-unlabeled logistic models.
//!
//! An annotated label (`s = +1`) is a certain positive; an unannotated one
//! (`s = -1`) is either a negative or a positive the annotator skipped. With
//! `c = Pr(s = +1 | y = +1)` constant, `Pr(s = +1 | x) = c * sigmoid(w.x + b)`,
//! and training maximises the likelihood of the observed `s` under that
//! model. The fitted `sigmoid(w.x + b)` then estimates `Pr(y = +1 | x)`.

mod estimate;
mod loss;
mod model;
mod sgd;

pub use estimate::{estimate_c, mean_positive_score, CEstimateConfig};
pub use loss::{
    gradient_scalar, logistic_loss, pu_loss, pu_loss_at, pu_loss_gradient, sigmoid, softplus,
    Gradient, GRADIENT_CAP, LOG_FLOOR,
};
pub use model::PUBinaryModel;
pub use sgd::{train_pu_binary, train_pu_binary_traced, LearningRate, SGDConfig};

pub(crate) use estimate::estimate_c_rows;
pub(crate) use sgd::fit_rows;
