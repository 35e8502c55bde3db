//! Label-frequency estimation from a held-out split.
//!
//! A plain logistic model `g(x) ~ Pr(s = +1 | x)` is fit on part of the data.
//! For a true positive, `Pr(s = +1 | x) = c`, so the mean of `g` over the
//! held-out annotated positives estimates `c`.

use rand::seq::SliceRandom;

use super::sgd::{fit_rows, SGDConfig};
use super::PUBinaryModel;
use crate::data::SparseVector;
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, PartialEq)]
pub struct CEstimateConfig {
    pub holdout_fraction: f64,
    /// Floor for the returned estimate.
    pub clamp_min: f64,
    pub rng_seed: u64,
}

impl Default for CEstimateConfig {
    fn default() -> Self {
        CEstimateConfig {
            holdout_fraction: 0.2,
            clamp_min: 0.05,
            rng_seed: 42,
        }
    }
}

impl CEstimateConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.holdout_fraction > 0.0 && self.holdout_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "holdout fraction {} outside (0, 1)",
                self.holdout_fraction
            )));
        }
        if !(self.clamp_min > 0.0 && self.clamp_min <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "clamp_min {} outside (0, 1]",
                self.clamp_min
            )));
        }
        Ok(())
    }

    pub fn with_seed(&self, rng_seed: u64) -> CEstimateConfig {
        CEstimateConfig {
            rng_seed,
            ..self.clone()
        }
    }

    pub(crate) fn clamp(&self, c: f64) -> f64 {
        c.clamp(self.clamp_min, 1.0)
    }
}

/// Mean of `g` over the held-out positives, clamped to `[clamp_min, 1]`.
pub fn mean_positive_score(held_out_positive_scores: &[f64], clamp_min: f64) -> Result<f64> {
    if held_out_positive_scores.is_empty() {
        return Err(Error::NoHeldOutPositives);
    }
    let mean = held_out_positive_scores.iter().sum::<f64>() / held_out_positive_scores.len() as f64;
    Ok(mean.clamp(clamp_min, 1.0))
}

/// Estimates `c = Pr(s = +1 | y = +1)` for one label.
///
/// The feature dimension is taken from the largest index present.
pub fn estimate_c(
    instances: &[SparseVector],
    labels: &[bool],
    cfg: &CEstimateConfig,
    sgd: &SGDConfig,
) -> Result<f64> {
    let dim = instances.iter().map(SparseVector::max_index).max().unwrap_or(0);
    let rows: Vec<usize> = (0..instances.len()).collect();
    let (sum, count) = estimate_c_rows(instances, labels, &rows, dim, cfg, sgd)?;
    if count == 0 {
        return Err(Error::NoHeldOutPositives);
    }
    Ok(cfg.clamp(sum / count as f64))
}

/// Sum of held-out positive scores and their count, for pooling across labels.
pub(crate) fn estimate_c_rows(
    instances: &[SparseVector],
    labels: &[bool],
    rows: &[usize],
    num_features: usize,
    cfg: &CEstimateConfig,
    sgd: &SGDConfig,
) -> Result<(f64, usize)> {
    cfg.validate()?;
    if rows.len() < 2 {
        return Err(Error::InvalidConfig(
            "label frequency estimation needs at least two instances".into(),
        ));
    }
    let mut shuffled = rows.to_vec();
    shuffled.shuffle(&mut seed::rng(cfg.rng_seed));
    let held = ((cfg.holdout_fraction * rows.len() as f64).round() as usize).clamp(1, rows.len() - 1);
    let (held_out, train) = shuffled.split_at(held);

    let g: PUBinaryModel = fit_rows(instances, labels, train, num_features, 1.0, sgd, None)?;
    let (sum, count) = held_out
        .iter()
        .filter(|&&i| labels[i])
        .fold((0.0, 0usize), |(s, n), &i| (s + g.predict_proba(&instances[i]), n + 1));
    Ok((sum, count))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_scores_give_that_constant() {
        assert_eq!(mean_positive_score(&[0.375; 8], 0.05).unwrap(), 0.375);
        assert_eq!(mean_positive_score(&[0.01; 3], 0.05).unwrap(), 0.05);
        assert!(matches!(
            mean_positive_score(&[], 0.05),
            Err(Error::NoHeldOutPositives)
        ));
    }

    #[test]
    fn no_positives_is_an_error_naming_the_fix() {
        let x: Vec<_> = (0..10).map(|i| SparseVector::from_dense(&[i as f64])).collect();
        let y = vec![false; 10];
        let err = estimate_c(&x, &y, &CEstimateConfig::default(), &SGDConfig::default()).unwrap_err();
        assert!(matches!(err, Error::NoHeldOutPositives));
        assert!(err.to_string().contains("holdout"));
    }

    #[test]
    fn config_validation() {
        for cfg in [
            CEstimateConfig { holdout_fraction: 0.0, ..Default::default() },
            CEstimateConfig { holdout_fraction: 1.0, ..Default::default() },
            CEstimateConfig { clamp_min: 0.0, ..Default::default() },
        ] {
            assert!(cfg.validate().is_err());
        }
    }
}
