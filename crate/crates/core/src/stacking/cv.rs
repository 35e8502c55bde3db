//! Out-of-fold predictions for training instances.
//!
//! For each label the instances are shuffled and cut into `m` near-equal
//! folds; fold `j` is predicted by a model trained on the other `m - 1`.

use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::train::{resolve_level_c, TAG_FOLD_C, TAG_FOLD_MODEL, TAG_PARTITION};
use super::{CMode, StackConfig};
use crate::data::MultiLabelDataset;
use crate::error::{Error, Result};
use crate::pu::{estimate_c_rows, fit_rows, PUBinaryModel};
use crate::seed;

/// One fold of one label: which rows were predicted, which were trained on,
/// and the model that did it.
#[derive(Debug, Clone)]
pub struct FoldRecord {
    pub held_out: Vec<usize>,
    pub trained_on: Vec<usize>,
    pub model: PUBinaryModel,
}

#[derive(Debug, Clone)]
pub struct LabelFolds {
    pub folds: Vec<FoldRecord>,
}

/// Shuffled contiguous partition of `0..n` into `m` folds, sizes differing by at most one.
fn partition(n: usize, m: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rows: Vec<usize> = (0..n).collect();
    rows.shuffle(&mut seed::rng(seed));
    let (base, extra) = (n / m, n % m);
    let mut folds = Vec::with_capacity(m);
    let mut start = 0;
    for j in 0..m {
        let len = base + usize::from(j < extra);
        folds.push(rows[start..start + len].to_vec());
        start += len;
    }
    folds
}

/// n x q matrix of out-of-fold probabilities for `ds` (whose feature
/// dimension must be `level_feature_dim`).
pub fn cross_val_predictions(
    ds: &MultiLabelDataset,
    cfg: &StackConfig,
    level_feature_dim: usize,
) -> Result<Vec<Vec<f64>>> {
    check_dim(ds, level_feature_dim)?;
    cfg.validate()?;
    let fixed = global_c(ds, cfg)?;
    cv_predictions(ds, cfg, fixed.as_deref(), None)
}

/// [`cross_val_predictions`] that also records every fold's membership and model.
pub fn cross_val_predictions_traced(
    ds: &MultiLabelDataset,
    cfg: &StackConfig,
    level_feature_dim: usize,
) -> Result<(Vec<Vec<f64>>, Vec<LabelFolds>)> {
    check_dim(ds, level_feature_dim)?;
    cfg.validate()?;
    let fixed = global_c(ds, cfg)?;
    let mut trace = Vec::new();
    let preds = cv_predictions(ds, cfg, fixed.as_deref(), Some(&mut trace))?;
    Ok((preds, trace))
}

fn check_dim(ds: &MultiLabelDataset, level_feature_dim: usize) -> Result<()> {
    if ds.num_features() != level_feature_dim {
        return Err(Error::DimensionMismatch {
            expected: level_feature_dim,
            found: ds.num_features(),
        });
    }
    Ok(())
}

fn global_c(ds: &MultiLabelDataset, cfg: &StackConfig) -> Result<Option<Vec<f64>>> {
    if cfg.c_mode == CMode::Global {
        resolve_level_c(ds, cfg, 0).map(Some)
    } else {
        Ok(None)
    }
}

/// Core of the out-of-fold pass. `fixed_c`, when given, supplies every fold
/// model's `c` per label; otherwise `c` follows `cfg.c_mode`, estimated on the
/// fold's training rows for [`CMode::PerLabel`].
pub(crate) fn cv_predictions(
    ds: &MultiLabelDataset,
    cfg: &StackConfig,
    fixed_c: Option<&[f64]>,
    trace: Option<&mut Vec<LabelFolds>>,
) -> Result<Vec<Vec<f64>>> {
    let n = ds.num_instances();
    let q = ds.num_labels();
    let m = cfg.cv_folds;
    if n < m {
        return Err(Error::InvalidConfig(format!(
            "{n} instances cannot fill {m} folds"
        )));
    }
    // folds and seeds are keyed by the input dimension, which identifies the level
    let level_key = ds.num_features() as u64;
    let partitions: Vec<Vec<Vec<usize>>> = (0..q)
        .map(|k| partition(n, m, seed::derive(cfg.seed, &[TAG_PARTITION, level_key, k as u64])))
        .collect();
    let columns: Vec<Vec<bool>> = (0..q).map(|k| ds.label_column(k)).collect();

    let tasks: Vec<(usize, usize)> = (0..q).flat_map(|k| (0..m).map(move |j| (k, j))).collect();
    let fitted: Vec<(Vec<usize>, PUBinaryModel)> = tasks
        .par_iter()
        .map(|&(k, j)| {
            let trained_on: Vec<usize> = partitions[k]
                .iter()
                .enumerate()
                .filter(|&(f, _)| f != j)
                .flat_map(|(_, rows)| rows.iter().copied())
                .collect();
            let labels = &columns[k];
            let coords = [level_key, k as u64, j as u64];
            let c = match (fixed_c, cfg.c_mode) {
                (Some(cs), _) => cs[k],
                (None, CMode::Fixed(c)) => c,
                (None, _) => fold_c(ds, cfg, labels, &trained_on, k, j, &coords)?,
            };
            let sgd = cfg
                .sgd
                .with_seed(seed::derive(cfg.seed, &[TAG_FOLD_MODEL, coords[0], coords[1], coords[2]]));
            let model = fit_rows(ds.instances(), labels, &trained_on, ds.num_features(), c, &sgd, None)?;
            Ok((trained_on, model))
        })
        .collect::<Result<_>>()?;

    let mut preds = vec![vec![0.0; q]; n];
    let mut records: Vec<LabelFolds> = Vec::new();
    let keep = trace.is_some();
    for (&(k, j), (trained_on, model)) in tasks.iter().zip(fitted) {
        let held_out = &partitions[k][j];
        for &i in held_out {
            preds[i][k] = model.predict_proba(&ds.instances()[i]);
        }
        if keep {
            if j == 0 {
                records.push(LabelFolds { folds: Vec::with_capacity(m) });
            }
            records[k].folds.push(FoldRecord {
                held_out: held_out.clone(),
                trained_on,
                model,
            });
        }
    }
    if let Some(trace) = trace {
        *trace = records;
    }
    Ok(preds)
}

fn fold_c(
    ds: &MultiLabelDataset,
    cfg: &StackConfig,
    labels: &[bool],
    trained_on: &[usize],
    k: usize,
    j: usize,
    coords: &[u64; 3],
) -> Result<f64> {
    let floor = cfg.c_estimate.clamp_min;
    if !trained_on.iter().any(|&i| labels[i]) {
        log::warn!(
            "label {} fold {}: no positives among training rows, using c = {floor}",
            k + 1,
            j + 1
        );
        return Ok(floor);
    }
    let est = cfg
        .c_estimate
        .with_seed(seed::derive(cfg.seed, &[TAG_FOLD_C, coords[0], coords[1], coords[2]]));
    let sgd = cfg
        .sgd
        .with_seed(seed::derive(cfg.seed, &[TAG_FOLD_C, coords[0], coords[1], coords[2], 1]));
    let (sum, count) = estimate_c_rows(ds.instances(), labels, trained_on, ds.num_features(), &est, &sgd)?;
    if count == 0 {
        log::warn!(
            "label {} fold {}: no held-out positives for estimating c, using c = {floor}",
            k + 1,
            j + 1
        );
        return Ok(floor);
    }
    Ok(cfg.c_estimate.clamp(sum / count as f64))
}
