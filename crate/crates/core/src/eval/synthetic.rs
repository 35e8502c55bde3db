//! Synthetic multi-label data with controllable label correlation.
//!
//! Label `k` has a unit weight vector `w_k`; `w_0` is a random direction and
//! `w_k = rho * w_{k-1} + sqrt(1 - rho^2) * u` with `u` a fresh unit direction
//! orthogonal to `w_{k-1}`, so consecutive labels have cosine similarity
//! exactly `rho`. Instances have `nnz_per_instance` standard-normal features
//! at random positions, and `y_ik = +1` iff
//! `gain * w_k.x_i + noise * e_i > t_k`, where `gain = sqrt(d / nnz)` puts the
//! clean score on a unit scale and `e_i` is one standard-normal draw per
//! instance. Thresholds `t_k` start at 0 and move to the median score for any
//! label that would otherwise be constant.

use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::data::{LabelVector, MultiLabelDataset, SparseVector};
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub n: usize,
    pub d: usize,
    pub q: usize,
    pub correlation: f64,
    pub noise: f64,
    pub nnz_per_instance: usize,
    pub seed: u64,
}

impl SyntheticConfig {
    pub fn new(n: usize, d: usize, q: usize, correlation: f64, noise: f64, seed: u64) -> Self {
        SyntheticConfig {
            n,
            d,
            q,
            correlation,
            noise,
            nnz_per_instance: d.min(10),
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 || self.d == 0 || self.q == 0 {
            return Err(Error::InvalidConfig(format!(
                "degenerate synthetic shape n={} d={} q={} (need n >= 2, d, q >= 1)",
                self.n, self.d, self.q
            )));
        }
        if !(0.0..=1.0).contains(&self.correlation) {
            return Err(Error::InvalidConfig(format!(
                "correlation {} outside [0, 1]",
                self.correlation
            )));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(Error::InvalidConfig(format!("noise {} must be >= 0", self.noise)));
        }
        if self.nnz_per_instance == 0 || self.nnz_per_instance > self.d {
            return Err(Error::InvalidConfig(format!(
                "nnz per instance {} outside [1, {}]",
                self.nnz_per_instance, self.d
            )));
        }
        Ok(())
    }
}

/// [`generate`] with `min(d, 10)` nonzeros per instance.
pub fn generate_synthetic(
    n: usize,
    d: usize,
    q: usize,
    correlation: f64,
    noise: f64,
    seed: u64,
) -> Result<MultiLabelDataset> {
    generate(&SyntheticConfig::new(n, d, q, correlation, noise, seed))
}

fn unit_normal(rng: &mut seed::Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn label_directions(rng: &mut seed::Rng, d: usize, q: usize, rho: f64) -> Vec<Vec<f64>> {
    let mut dirs = vec![unit_normal(rng, d)];
    let fresh_weight = (1.0 - rho * rho).max(0.0).sqrt();
    for _ in 1..q {
        let prev = dirs.last().expect("non-empty");
        let next = if d == 1 {
            prev.clone()
        } else {
            let u = loop {
                let mut u = unit_normal(rng, d);
                let proj: f64 = u.iter().zip(prev).map(|(a, b)| a * b).sum();
                for (a, b) in u.iter_mut().zip(prev) {
                    *a -= proj * b;
                }
                let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 1e-9 {
                    break u.into_iter().map(|x| x / norm).collect::<Vec<f64>>();
                }
            };
            prev.iter()
                .zip(&u)
                .map(|(p, v)| rho * p + fresh_weight * v)
                .collect()
        };
        dirs.push(next);
    }
    dirs
}

pub fn generate(cfg: &SyntheticConfig) -> Result<MultiLabelDataset> {
    cfg.validate()?;
    let mut rng = seed::rng(cfg.seed);
    let dirs = label_directions(&mut rng, cfg.d, cfg.q, cfg.correlation);
    let gain = (cfg.d as f64 / cfg.nnz_per_instance as f64).sqrt();

    let mut instances = Vec::with_capacity(cfg.n);
    for _ in 0..cfg.n {
        let mut idx = index::sample(&mut rng, cfg.d, cfg.nnz_per_instance).into_vec();
        idx.sort_unstable();
        let entries = idx
            .into_iter()
            .map(|j| (j + 1, rng.sample::<f64, _>(StandardNormal)))
            .collect();
        instances.push(SparseVector::new(entries)?);
    }
    let noise: Vec<f64> = (0..cfg.n).map(|_| rng.sample(StandardNormal)).collect();

    let mut bits = vec![vec![false; cfg.q]; cfg.n];
    for (k, w) in dirs.iter().enumerate() {
        let scores: Vec<f64> = instances
            .iter()
            .zip(&noise)
            .map(|(x, e)| gain * x.dot(w) + cfg.noise * e)
            .collect();
        let mut threshold = 0.0;
        let positives = scores.iter().filter(|&&s| s > threshold).count();
        if positives == 0 || positives == cfg.n {
            let mut sorted = scores.clone();
            sorted.sort_by(f64::total_cmp);
            let (lo, hi) = (sorted[(cfg.n - 1) / 2], sorted[cfg.n / 2]);
            threshold = if lo < hi { 0.5 * (lo + hi) } else { lo };
            let positives = scores.iter().filter(|&&s| s > threshold).count();
            if positives == 0 || positives == cfg.n {
                return Err(Error::InvalidConfig(format!(
                    "label {} cannot be given both classes",
                    k + 1
                )));
            }
        }
        for (row, &s) in bits.iter_mut().zip(&scores) {
            row[k] = s > threshold;
        }
    }
    let labels: Vec<LabelVector> = bits.into_iter().map(LabelVector::new).collect();
    MultiLabelDataset::new(cfg.d, cfg.q, instances, labels.clone(), Some(labels))
}
