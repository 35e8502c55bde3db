#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use smile::{LabelVector, MultiLabelDataset, SparseVector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.sample(StandardNormal)).collect()
}

/// Dense Gaussian instances labelled by a random hyperplane through the
/// origin; points within `margin` of it are redrawn. Each positive is
/// observed with probability `c`.
pub struct PuSample {
    pub x: Vec<SparseVector>,
    pub y: Vec<bool>,
    pub s: Vec<bool>,
}

pub fn separable_pu(n: usize, d: usize, c: f64, margin: f64, seed: u64) -> PuSample {
    let mut r = rng(seed);
    let w = gaussian_vec(&mut r, d);
    let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    let (mut x, mut y, mut s) = (Vec::new(), Vec::new(), Vec::new());
    while x.len() < n {
        let xi = gaussian_vec(&mut r, d);
        let m = xi.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / norm;
        if m.abs() < margin {
            continue;
        }
        let yi = m > 0.0;
        x.push(SparseVector::from_dense(&xi));
        y.push(yi);
        s.push(yi && r.random::<f64>() < c);
    }
    PuSample { x, y, s }
}

/// Random sparse instance with indices in `1..=d`, each present with probability `density`.
pub fn random_sparse(r: &mut ChaCha8Rng, d: usize, density: f64) -> SparseVector {
    let mut entries = Vec::new();
    for j in 1..=d {
        if r.random::<f64>() < density {
            let v: f64 = r.random_range(-2.0..2.0);
            if v != 0.0 {
                entries.push((j, v));
            }
        }
    }
    SparseVector::new(entries).unwrap()
}

pub fn random_labels(r: &mut ChaCha8Rng, q: usize, p: f64) -> LabelVector {
    LabelVector::new((0..q).map(|_| r.random::<f64>() < p).collect())
}

/// Small random dataset with fully observed labels.
pub fn random_dataset(n: usize, d: usize, q: usize, seed: u64) -> MultiLabelDataset {
    let mut r = rng(seed);
    let x: Vec<_> = (0..n).map(|_| random_sparse(&mut r, d, 0.5)).collect();
    let s: Vec<_> = (0..n).map(|_| random_labels(&mut r, q, 0.4)).collect();
    MultiLabelDataset::new(d, q, x, s, None).unwrap()
}

pub fn write_file(dir: &std::path::Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}
