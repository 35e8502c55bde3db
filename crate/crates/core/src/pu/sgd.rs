use rand::seq::SliceRandom;

use super::loss::{gradient_scalar, pu_loss_at};
use super::PUBinaryModel;
use crate::data::SparseVector;
use crate::error::{Error, Result};
use crate::seed;

/// Step-size schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LearningRate {
    /// `eta_t = eta_0`.
    Constant,
    /// `eta_t = eta_0 / (1 + t / n)`, `t` counting samples seen, `n` the training size.
    InverseScaling,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SGDConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub schedule: LearningRate,
    pub l2_penalty: f64,
    pub rng_seed: u64,
    pub shuffle: bool,
}

impl Default for SGDConfig {
    fn default() -> Self {
        SGDConfig {
            epochs: 10,
            learning_rate: 0.1,
            schedule: LearningRate::InverseScaling,
            l2_penalty: 1e-6,
            rng_seed: 42,
            shuffle: true,
        }
    }
}

impl SGDConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "learning rate {} must be positive",
                self.learning_rate
            )));
        }
        if !(self.l2_penalty >= 0.0 && self.l2_penalty.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "l2 penalty {} must be non-negative",
                self.l2_penalty
            )));
        }
        Ok(())
    }

    pub fn with_seed(&self, rng_seed: u64) -> SGDConfig {
        SGDConfig {
            rng_seed,
            ..self.clone()
        }
    }
}

/// Trains one label's PU model on every instance.
///
/// `labels[i]` is `true` when label is observed (+1) on instance `i`.
pub fn train_pu_binary(
    instances: &[SparseVector],
    labels: &[bool],
    num_features: usize,
    c: f64,
    cfg: &SGDConfig,
) -> Result<PUBinaryModel> {
    let rows: Vec<usize> = (0..instances.len()).collect();
    fit_rows(instances, labels, &rows, num_features, c, cfg, None)
}

/// [`train_pu_binary`] that also returns the mean training loss after each epoch.
pub fn train_pu_binary_traced(
    instances: &[SparseVector],
    labels: &[bool],
    num_features: usize,
    c: f64,
    cfg: &SGDConfig,
) -> Result<(PUBinaryModel, Vec<f64>)> {
    let rows: Vec<usize> = (0..instances.len()).collect();
    let mut trace = Vec::with_capacity(cfg.epochs);
    let model = fit_rows(instances, labels, &rows, num_features, c, cfg, Some(&mut trace))?;
    Ok((model, trace))
}

/// Weights stored as `scale * raw` so the L2 shrink of every coordinate is a
/// single multiply; each step only touches the sample's nonzero features.
struct ScaledWeights {
    raw: Vec<f64>,
    scale: f64,
}

impl ScaledWeights {
    const RESCALE_BELOW: f64 = 1e-9;

    fn dot(&self, x: &SparseVector) -> f64 {
        self.scale * x.dot(&self.raw)
    }

    fn shrink(&mut self, factor: f64) {
        self.scale *= factor;
        if self.scale < Self::RESCALE_BELOW {
            for w in &mut self.raw {
                *w *= self.scale;
            }
            self.scale = 1.0;
        }
    }

    fn add_scaled(&mut self, x: &SparseVector, step: f64) {
        for (j, v) in x.iter() {
            self.raw[j - 1] -= step * v / self.scale;
        }
    }

    fn into_dense(self) -> Vec<f64> {
        let scale = self.scale;
        let mut raw = self.raw;
        if scale != 1.0 {
            for w in &mut raw {
                *w *= scale;
            }
        }
        raw
    }
}

// rows are visited in shuffled order, so fetch a few steps early
const PREFETCH_AHEAD: usize = 8;

#[inline]
fn prefetch_header(x: &SparseVector) {
    #[cfg(target_arch = "x86_64")]
    {
        use std::arch::x86_64::{_mm_prefetch, _MM_HINT_T0};
        // SAFETY: prefetching a valid reference's address has no effects.
        unsafe { _mm_prefetch::<_MM_HINT_T0>((x as *const SparseVector).cast::<i8>()) };
    }
    #[cfg(not(target_arch = "x86_64"))]
    let _ = x;
}

#[inline]
fn prefetch(x: &SparseVector) {
    #[cfg(target_arch = "x86_64")]
    {
        use std::arch::x86_64::{_mm_prefetch, _MM_HINT_T0};
        let entries = x.entries();
        let base = entries.as_ptr().cast::<i8>();
        let bytes = std::mem::size_of_val(entries).min(512);
        let mut off = 0;
        while off < bytes {
            // SAFETY: `off` stays inside the entries allocation, and a
            // prefetch never faults.
            unsafe { _mm_prefetch::<_MM_HINT_T0>(base.add(off)) };
            off += 64;
        }
    }
    #[cfg(not(target_arch = "x86_64"))]
    let _ = x;
}

fn mean_loss(
    weights: &ScaledWeights,
    bias: f64,
    instances: &[SparseVector],
    labels: &[bool],
    rows: &[usize],
    c: f64,
) -> f64 {
    let total: f64 = rows
        .iter()
        .map(|&i| pu_loss_at(weights.dot(&instances[i]) + bias, labels[i], c))
        .sum();
    total / rows.len() as f64
}

/// SGD over the given rows of `instances`.
pub(crate) fn fit_rows(
    instances: &[SparseVector],
    labels: &[bool],
    rows: &[usize],
    num_features: usize,
    c: f64,
    cfg: &SGDConfig,
    mut trace: Option<&mut Vec<f64>>,
) -> Result<PUBinaryModel> {
    cfg.validate()?;
    if instances.len() != labels.len() {
        return Err(Error::InvalidConfig(format!(
            "{} instances but {} labels",
            instances.len(),
            labels.len()
        )));
    }
    if rows.is_empty() {
        return Err(Error::InvalidConfig("no training instances".into()));
    }
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::InvalidConfig(format!("c = {c} outside (0, 1]")));
    }
    if let Some(&i) = rows.iter().find(|&&i| instances[i].max_index() > num_features) {
        return Err(Error::DimensionMismatch {
            expected: num_features,
            found: instances[i].max_index(),
        });
    }

    let mut weights = ScaledWeights {
        raw: vec![0.0; num_features],
        scale: 1.0,
    };
    let mut bias = 0.0;
    let mut order = rows.to_vec();
    let mut rng = seed::rng(cfg.rng_seed);
    let n = order.len() as f64;
    let mut t = 0u64;

    for epoch in 0..cfg.epochs {
        if cfg.shuffle {
            order.shuffle(&mut rng);
        }
        for (pos, &i) in order.iter().enumerate() {
            if let Some(&ahead) = order.get(pos + 2 * PREFETCH_AHEAD) {
                prefetch_header(&instances[ahead]);
            }
            if let Some(&ahead) = order.get(pos + PREFETCH_AHEAD) {
                prefetch(&instances[ahead]);
            }
            let eta = match cfg.schedule {
                LearningRate::Constant => cfg.learning_rate,
                LearningRate::InverseScaling => cfg.learning_rate / (1.0 + t as f64 / n),
            };
            let x = &instances[i];
            let z = weights.dot(x) + bias;
            if !z.is_finite() {
                return Err(Error::Divergence(format!(
                    "non-finite score in epoch {} at step {t}; reduce the learning rate",
                    epoch + 1
                )));
            }
            let g = gradient_scalar(z, labels[i], c);
            if cfg.l2_penalty > 0.0 {
                let shrink = 1.0 - eta * cfg.l2_penalty;
                if shrink <= 0.0 {
                    return Err(Error::Divergence(format!(
                        "step {eta} times l2 penalty {} is at least 1",
                        cfg.l2_penalty
                    )));
                }
                weights.shrink(shrink);
            }
            let step = eta * g;
            weights.add_scaled(x, step);
            bias -= step;
            t += 1;
        }
        if let Some(trace) = trace.as_deref_mut() {
            let loss = mean_loss(&weights, bias, instances, labels, rows, c);
            if !loss.is_finite() {
                return Err(Error::Divergence(format!(
                    "non-finite loss after epoch {}",
                    epoch + 1
                )));
            }
            trace.push(loss);
        }
    }

    let dense = weights.into_dense();
    if !bias.is_finite() || dense.iter().any(|w| !w.is_finite()) {
        return Err(Error::Divergence(
            "non-finite weights after training; reduce the learning rate".into(),
        ));
    }
    PUBinaryModel::new(dense, bias, c)
}
