//! Training-time scaling benchmark.

use std::io::Write;
use std::time::Instant;

use super::synthetic::{generate, SyntheticConfig};
use crate::error::{Error, Result};
use crate::stacking::{train_stacked, StackConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    /// Training-set sizes, strictly increasing.
    pub sizes: Vec<usize>,
    pub dim: usize,
    pub num_labels: usize,
    pub nnz_per_instance: usize,
    pub correlation: f64,
    pub noise: f64,
    pub stack: StackConfig,
    /// Timed rounds over all sizes; the fastest time per size is reported.
    pub repeats: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: vec![10_000, 20_000, 40_000],
            dim: 1000,
            num_labels: 10,
            nnz_per_instance: 20,
            correlation: 0.8,
            noise: 0.5,
            stack: StackConfig::default(),
            repeats: 5,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub train_seconds: f64,
    /// `n / n_prev` and `seconds / seconds_prev` relative to the previous row.
    pub size_ratio: Option<f64>,
    pub time_ratio: Option<f64>,
}

/// Times [`train_stacked`] at each size on a single thread.
///
/// Data generation is excluded from the timings. Every size uses the same
/// label directions and per-instance density.
pub fn bench_scaling(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    if cfg.sizes.is_empty() || cfg.sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig("sizes must be non-empty and increasing".into()));
    }
    if cfg.repeats == 0 {
        return Err(Error::InvalidConfig("repeats must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;

    let datasets = cfg
        .sizes
        .iter()
        .map(|&n| {
            let ds = generate(&SyntheticConfig {
                nnz_per_instance: cfg.nnz_per_instance.min(cfg.dim),
                ..SyntheticConfig::new(n.max(2), cfg.dim, cfg.num_labels, cfg.correlation, cfg.noise, cfg.seed)
            })?;
            // a single requested instance trains on just that instance
            Ok(if n < 2 { ds.subset(&[0]) } else { ds })
        })
        .collect::<Result<Vec<_>>>()?;

    // rounds sweep every size so a slow stretch of wall-clock time does not
    // land on all repetitions of one size
    let mut best = vec![f64::INFINITY; datasets.len()];
    for _ in 0..cfg.repeats {
        for (ds, best) in datasets.iter().zip(&mut best) {
            let start = Instant::now();
            pool.install(|| train_stacked(ds, &cfg.stack))?;
            *best = best.min(start.elapsed().as_secs_f64());
        }
    }

    let mut rows: Vec<BenchRow> = Vec::with_capacity(cfg.sizes.len());
    for (&n, &seconds) in cfg.sizes.iter().zip(&best) {
        let (size_ratio, time_ratio) = match rows.last() {
            Some(prev) => (
                Some(n as f64 / prev.n as f64),
                Some(seconds / prev.train_seconds),
            ),
            None => (None, None),
        };
        rows.push(BenchRow {
            n,
            train_seconds: seconds,
            size_ratio,
            time_ratio,
        });
    }
    Ok(rows)
}

pub fn write_bench_csv<W: Write>(rows: &[BenchRow], mut w: W) -> Result<()> {
    writeln!(w, "n,train_seconds,size_ratio,time_ratio")?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            r.n,
            r.train_seconds,
            opt(r.size_ratio),
            opt(r.time_ratio)
        )?;
    }
    w.flush()?;
    Ok(())
}
