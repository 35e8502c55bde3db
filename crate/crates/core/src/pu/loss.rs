use super::PUBinaryModel;
use crate::data::SparseVector;

/// Smallest argument passed to `ln` when a probability underflows.
pub const LOG_FLOOR: f64 = 1e-300;
/// Upper bound on the magnitude of the per-sample gradient scalar.
pub const GRADIENT_CAP: f64 = 1e6;

/// `1 / (1 + exp(-z))`, exponentiating only non-positive arguments.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + exp(z))` without overflow.
pub fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Standard logistic loss `ln(1 + exp(-s z))` for `s = ±1`.
pub fn logistic_loss(z: f64, positive: bool) -> f64 {
    if positive {
        softplus(-z)
    } else {
        softplus(z)
    }
}

/// PU negative log-likelihood of one observation at score `z`.
///
/// `-ln(c * sigmoid(z))` for an annotated positive and
/// `-ln(1 - c * sigmoid(z))` otherwise. The positive branch is evaluated as
/// `-ln c + softplus(-z)`, which cannot underflow; the negative branch uses
/// `1 - c*sigmoid(z) = (1 - c) + c*sigmoid(-z)`.
pub fn pu_loss_at(z: f64, positive: bool, c: f64) -> f64 {
    if positive {
        -c.ln() + softplus(-z)
    } else if c == 1.0 {
        softplus(z)
    } else {
        -((1.0 - c) + c * sigmoid(-z)).max(LOG_FLOOR).ln()
    }
}

/// Derivative of [`pu_loss_at`] with respect to `z`.
///
/// Positive: `-(1 - sigmoid(z))`, independent of `c`.
/// Negative: `c sigmoid(z) (1 - sigmoid(z)) / (1 - c sigmoid(z))`, computed as
/// `sigmoid(z) * [c sigmoid(-z) / ((1 - c) + c sigmoid(-z))]` so that at
/// `c = 1` it reduces exactly to the logistic gradient `sigmoid(z)`.
pub fn gradient_scalar(z: f64, positive: bool, c: f64) -> f64 {
    if positive {
        return -sigmoid(-z);
    }
    let tail = c * sigmoid(-z);
    let denom = (1.0 - c) + tail;
    let ratio = if denom > 0.0 { tail / denom } else { 1.0 };
    (sigmoid(z) * ratio).min(GRADIENT_CAP)
}

/// Per-sample PU loss of `model` on `(x, s)`.
pub fn pu_loss(model: &PUBinaryModel, x: &SparseVector, positive: bool) -> f64 {
    pu_loss_at(model.score(x), positive, model.label_frequency_c())
}

/// Gradient of the per-sample loss: `g * x` on the support of `x`, plus `g`
/// for the bias.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub weights: Vec<(usize, f64)>,
    pub bias: f64,
}

pub fn pu_loss_gradient(model: &PUBinaryModel, x: &SparseVector, positive: bool) -> Gradient {
    let g = gradient_scalar(model.score(x), positive, model.label_frequency_c());
    Gradient {
        weights: x.iter().map(|(j, v)| (j, g * v)).collect(),
        bias: g,
    }
}
