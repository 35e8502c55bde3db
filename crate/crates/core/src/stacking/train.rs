use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::cv::cv_predictions;
use super::{CMode, StackConfig, StackedModel};
use crate::data::{extend_features, MultiLabelDataset};
use crate::error::Result;
use crate::pu::{estimate_c_rows, fit_rows, PUBinaryModel};
use crate::seed;

pub(crate) const TAG_MODEL: u64 = 1;
pub(crate) const TAG_C: u64 = 2;
pub(crate) const TAG_PARTITION: u64 = 3;
pub(crate) const TAG_FOLD_MODEL: u64 = 4;
pub(crate) const TAG_FOLD_C: u64 = 5;

/// SGD seed of the level-`level` model for label `label` (0-based).
pub fn model_seed(root: u64, level: usize, label: usize) -> u64 {
    seed::derive(root, &[TAG_MODEL, level as u64, label as u64])
}

/// Label frequency for every label of a level, per `cfg.c_mode`.
pub(crate) fn resolve_level_c(
    ds: &MultiLabelDataset,
    cfg: &StackConfig,
    level: usize,
) -> Result<Vec<f64>> {
    let q = ds.num_labels();
    if let CMode::Fixed(c) = cfg.c_mode {
        return Ok(vec![c; q]);
    }
    let rows: Vec<usize> = (0..ds.num_instances()).collect();
    // keyed by input dimension so out-of-fold passes on the same features agree
    let key = ds.num_features() as u64;
    let parts: Vec<(f64, usize)> = (0..q)
        .into_par_iter()
        .map(|k| {
            let labels = ds.label_column(k);
            let est = cfg
                .c_estimate
                .with_seed(seed::derive(cfg.seed, &[TAG_C, key, k as u64]));
            let sgd = cfg
                .sgd
                .with_seed(seed::derive(cfg.seed, &[TAG_C, key, k as u64, 1]));
            estimate_c_rows(ds.instances(), &labels, &rows, ds.num_features(), &est, &sgd)
        })
        .collect::<Result<_>>()?;

    let floor = cfg.c_estimate.clamp_min;
    match cfg.c_mode {
        CMode::Global => {
            let (sum, count) = parts
                .iter()
                .fold((0.0, 0usize), |(s, n), &(ps, pn)| (s + ps, n + pn));
            let c = if count == 0 {
                log::warn!("level {level}: no held-out positives for any label, using c = {floor}");
                floor
            } else {
                cfg.c_estimate.clamp(sum / count as f64)
            };
            Ok(vec![c; q])
        }
        _ => Ok(parts
            .iter()
            .enumerate()
            .map(|(k, &(sum, count))| {
                if count == 0 {
                    log::warn!(
                        "level {level} label {}: no held-out positives, using c = {floor}",
                        k + 1
                    );
                    floor
                } else {
                    cfg.c_estimate.clamp(sum / count as f64)
                }
            })
            .collect()),
    }
}

fn train_level(
    ds: &MultiLabelDataset,
    cfg: &StackConfig,
    level: usize,
    c: &[f64],
) -> Result<Vec<PUBinaryModel>> {
    let rows: Vec<usize> = (0..ds.num_instances()).collect();
    (0..ds.num_labels())
        .into_par_iter()
        .map(|k| {
            let labels = ds.label_column(k);
            let sgd = cfg.sgd.with_seed(model_seed(cfg.seed, level, k));
            fit_rows(ds.instances(), &labels, &rows, ds.num_features(), c[k], &sgd, None)
        })
        .collect()
}

/// Trains level 0 and `cfg.num_stack_levels` stacked levels on `ds`.
pub fn train_stacked(ds: &MultiLabelDataset, cfg: &StackConfig) -> Result<StackedModel> {
    train_stacked_timed(ds, cfg).map(|(m, _)| m)
}

/// [`train_stacked`] plus the wall-clock time spent on each level.
///
/// A stacked level's time includes the out-of-fold predictions it consumes.
pub fn train_stacked_timed(
    ds: &MultiLabelDataset,
    cfg: &StackConfig,
) -> Result<(StackedModel, Vec<Duration>)> {
    cfg.validate()?;
    let mut timings = Vec::with_capacity(cfg.num_stack_levels + 1);

    let start = Instant::now();
    let base_c = resolve_level_c(ds, cfg, 0)?;
    let mut levels = vec![train_level(ds, cfg, 0, &base_c)?];
    timings.push(start.elapsed());

    let mut current = ds.clone();
    let mut prev_c = base_c.clone();
    for level in 1..=cfg.num_stack_levels {
        let start = Instant::now();
        let fold_c = if cfg.freeze_c {
            Some(base_c.as_slice())
        } else if cfg.c_mode == CMode::Global {
            Some(prev_c.as_slice())
        } else {
            None
        };
        let preds = cv_predictions(&current, cfg, fold_c, None)?;
        let aug: Vec<Vec<f64>> = preds
            .into_iter()
            .map(|row| row.into_iter().map(|p| cfg.augmentation.apply(p)).collect())
            .collect();
        current = extend_features(&current, &aug)?;
        let c = if cfg.freeze_c {
            base_c.clone()
        } else {
            resolve_level_c(&current, cfg, level)?
        };
        levels.push(train_level(&current, cfg, level, &c)?);
        prev_c = c;
        timings.push(start.elapsed());
    }

    let model = StackedModel::new(ds.num_labels(), ds.num_features(), cfg.augmentation, levels)?;
    Ok((model, timings))
}
