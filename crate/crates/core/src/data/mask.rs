use std::io::Write;

use rand::seq::index;

use super::{LabelVector, MultiLabelDataset};
use crate::error::{Error, Result};
use crate::seed;

/// How many observed positives to hide, and the seed choosing which.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskSpec {
    pub missing_rate: f64,
    pub rng_seed: u64,
}

impl MaskSpec {
    pub fn new(missing_rate: f64, rng_seed: u64) -> Result<Self> {
        let spec = MaskSpec {
            missing_rate,
            rng_seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.missing_rate) {
            return Err(Error::InvalidConfig(format!(
                "missing rate {} outside [0, 1]",
                self.missing_rate
            )));
        }
        Ok(())
    }

    /// Positives kept out of `positives`: `round((1 - rate) * positives)`.
    pub fn kept(&self, positives: usize) -> usize {
        (((1.0 - self.missing_rate) * positives as f64).round() as usize).min(positives)
    }
}

/// Result of [`mask_labels`]: the masked dataset plus the flipped entries.
#[derive(Debug, Clone)]
pub struct Masked {
    pub dataset: MultiLabelDataset,
    /// `(instance, label)` pairs turned from +1 to -1, both 0-based, sorted.
    pub flipped: Vec<(usize, usize)>,
}

impl Masked {
    /// Audit sidecar: one `i k` line per flipped pair.
    pub fn write_audit<W: Write>(&self, mut w: W) -> Result<()> {
        for &(i, k) in &self.flipped {
            writeln!(w, "{i} {k}")?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Hides a uniformly drawn subset of the observed positive labels.
///
/// All observed (instance, label) positives are pooled and
/// `P - round((1 - rate) * P)` of them are sampled without replacement and
/// set to -1. The result's ground truth is the input's ground truth if it had
/// one, otherwise the input's observed labels. Features are shared untouched.
pub fn mask_labels(ds: &MultiLabelDataset, spec: &MaskSpec) -> Result<Masked> {
    spec.validate()?;
    let positives: Vec<(usize, usize)> = ds
        .observed_labels()
        .iter()
        .enumerate()
        .flat_map(|(i, s)| s.positives().map(move |k| (i, k)))
        .collect();
    let total = positives.len();
    let to_flip = total - spec.kept(total);

    let mut rng = seed::rng(spec.rng_seed);
    let mut flipped: Vec<(usize, usize)> = index::sample(&mut rng, total, to_flip)
        .into_iter()
        .map(|j| positives[j])
        .collect();
    flipped.sort_unstable();

    let mut observed: Vec<LabelVector> = ds.observed_labels().to_vec();
    for &(i, k) in &flipped {
        observed[i].set(k, false);
    }
    let truth = ds.truth().to_vec();
    let dataset = MultiLabelDataset::new(
        ds.num_features(),
        ds.num_labels(),
        ds.instances().to_vec(),
        observed,
        Some(truth),
    )?;
    Ok(Masked { dataset, flipped })
}
