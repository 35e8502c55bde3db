//! Missing-rate experiment.
//!
//! Outer k-fold cross-validation: for every fold, the training part is masked
//! at each missing rate, each method is trained on it, and Micro-F1 is taken
//! against the untouched ground truth of the test fold. Masks are redrawn for
//! every fold and seed.

use std::io::Write;
use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::metrics::micro_f1;
use crate::data::{mask_labels, LabelVector, MaskSpec, MultiLabelDataset};
use crate::error::{Error, Result};
use crate::seed;
use crate::stacking::{train_stacked, CMode, StackConfig};

const TAG_OUTER: u64 = 11;
const TAG_MASK: u64 = 12;
const TAG_TRAIN: u64 = 13;

/// A model variant compared in the experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Flat logistic regression (`c = 1`): missing labels count as negatives.
    Logistic,
    /// Flat PU models (level 0 only).
    PuFlat,
    /// PU models with the configured number of stacked levels.
    PuStacked(usize),
}

impl Method {
    pub fn name(&self) -> String {
        match self {
            Method::Logistic => "logistic_c1".into(),
            Method::PuFlat => "pu_L0".into(),
            Method::PuStacked(l) => format!("pu_L{l}"),
        }
    }

    fn config(&self, base: &StackConfig) -> StackConfig {
        match *self {
            Method::Logistic => StackConfig {
                num_stack_levels: 0,
                c_mode: CMode::Fixed(1.0),
                ..base.clone()
            },
            Method::PuFlat => base.flat(),
            Method::PuStacked(l) => StackConfig {
                num_stack_levels: l,
                ..base.clone()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentGrid {
    pub missing_rates: Vec<f64>,
    /// Outer cross-validation folds.
    pub folds: usize,
    pub seeds: Vec<u64>,
    pub stack: StackConfig,
    pub threshold: f64,
    /// Include the flat `c = 1` comparator.
    pub include_logistic: bool,
    /// Run cells one at a time (for clean timings).
    pub sequential: bool,
}

impl Default for ExperimentGrid {
    fn default() -> Self {
        ExperimentGrid {
            missing_rates: vec![0.0, 0.2, 0.4, 0.6],
            folds: 10,
            seeds: vec![42],
            stack: StackConfig::default(),
            threshold: 0.5,
            include_logistic: true,
            sequential: false,
        }
    }
}

impl ExperimentGrid {
    pub fn methods(&self) -> Vec<Method> {
        let mut methods = Vec::new();
        if self.include_logistic {
            methods.push(Method::Logistic);
        }
        methods.push(Method::PuFlat);
        if self.stack.num_stack_levels > 0 {
            methods.push(Method::PuStacked(self.stack.num_stack_levels));
        }
        methods
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.missing_rates.is_empty() || self.seeds.is_empty() {
            return Err(Error::InvalidConfig(
                "missing rates and seeds must be non-empty".into(),
            ));
        }
        for &r in &self.missing_rates {
            MaskSpec::new(r, 0)?;
        }
        if self.folds < 2 || self.folds > n {
            return Err(Error::InvalidConfig(format!(
                "{} outer folds for {n} instances",
                self.folds
            )));
        }
        self.stack.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub missing_rate: f64,
    pub method: String,
    pub mean_micro_f1: f64,
    pub std_micro_f1: f64,
    pub mean_train_seconds: f64,
    /// Individual Micro-F1 values, ordered by seed then fold.
    pub runs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentTable {
    pub rows: Vec<ExperimentRow>,
}

impl ExperimentTable {
    pub fn get(&self, missing_rate: f64, method: &str) -> Option<&ExperimentRow> {
        self.rows
            .iter()
            .find(|r| r.missing_rate == missing_rate && r.method == method)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "missing_rate,method,mean_micro_f1,std_micro_f1,mean_train_seconds"
        )?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{}",
                r.missing_rate, r.method, r.mean_micro_f1, r.std_micro_f1, r.mean_train_seconds
            )?;
        }
        w.flush()?;
        Ok(())
    }

    /// One `missing_rate mean_micro_f1` series per method, separated by blank lines.
    pub fn write_plot_data<W: Write>(&self, mut w: W) -> Result<()> {
        let mut methods: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !methods.contains(&r.method.as_str()) {
                methods.push(&r.method);
            }
        }
        for (s, method) in methods.iter().enumerate() {
            if s > 0 {
                writeln!(w)?;
            }
            writeln!(w, "# {method}")?;
            for r in self.rows.iter().filter(|r| r.method == *method) {
                writeln!(w, "{} {}", r.missing_rate, r.mean_micro_f1)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn outer_folds(n: usize, folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rows: Vec<usize> = (0..n).collect();
    rows.shuffle(&mut seed::rng(seed::derive(seed, &[TAG_OUTER])));
    let mut out = vec![Vec::new(); folds];
    for (pos, i) in rows.into_iter().enumerate() {
        out[pos % folds].push(i);
    }
    out
}

struct CellResult {
    f1: Vec<f64>,
    seconds: Vec<f64>,
}

#[allow(clippy::too_many_arguments)]
fn run_cell(
    ds: &MultiLabelDataset,
    grid: &ExperimentGrid,
    methods: &[Method],
    seed: u64,
    fold: usize,
    rate_idx: usize,
    test_rows: &[usize],
    train_rows: &[usize],
) -> Result<CellResult> {
    let train = ds.subset(train_rows).fully_observed();
    let test = ds.subset(test_rows);
    let spec = MaskSpec::new(
        grid.missing_rates[rate_idx],
        seed::derive(seed, &[TAG_MASK, fold as u64, rate_idx as u64]),
    )?;
    let masked = mask_labels(&train, &spec)?.dataset;
    let train_seed = seed::derive(seed, &[TAG_TRAIN, fold as u64]);

    let mut f1 = Vec::with_capacity(methods.len());
    let mut seconds = Vec::with_capacity(methods.len());
    for method in methods {
        let mut cfg = method.config(&grid.stack);
        cfg.seed = train_seed;
        let start = Instant::now();
        let model = train_stacked(&masked, &cfg)?;
        seconds.push(start.elapsed().as_secs_f64());
        let predicted: Vec<LabelVector> = model
            .predict_dataset(&test, grid.threshold)?
            .into_iter()
            .map(|p| p.labels)
            .collect();
        f1.push(micro_f1(&predicted, test.truth())?.micro_f1);
    }
    Ok(CellResult { f1, seconds })
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs every (seed, fold, missing rate) cell and aggregates per (rate, method).
///
/// `ds.truth()` is taken as the complete label matrix. Standard deviations
/// are sample deviations over the seed x fold runs.
pub fn run_missing_rate_experiment(
    ds: &MultiLabelDataset,
    grid: &ExperimentGrid,
) -> Result<ExperimentTable> {
    grid.validate(ds.num_instances())?;
    let methods = grid.methods();

    let mut cells = Vec::new();
    for (s, &seed) in grid.seeds.iter().enumerate() {
        let folds = outer_folds(ds.num_instances(), grid.folds, seed);
        for f in 0..grid.folds {
            let test_rows = folds[f].clone();
            let train_rows: Vec<usize> = folds
                .iter()
                .enumerate()
                .filter(|&(g, _)| g != f)
                .flat_map(|(_, rows)| rows.iter().copied())
                .collect();
            for r in 0..grid.missing_rates.len() {
                cells.push((s, seed, f, r, test_rows.clone(), train_rows.clone()));
            }
        }
    }

    let run = |cell: &(usize, u64, usize, usize, Vec<usize>, Vec<usize>)| {
        let (_, seed, f, r, ref test_rows, ref train_rows) = *cell;
        run_cell(ds, grid, &methods, seed, f, r, test_rows, train_rows)
    };
    let results: Vec<CellResult> = if grid.sequential {
        cells.iter().map(run).collect::<Result<_>>()?
    } else {
        cells.par_iter().map(run).collect::<Result<_>>()?
    };

    let mut rows = Vec::new();
    for (r, &rate) in grid.missing_rates.iter().enumerate() {
        for (m, method) in methods.iter().enumerate() {
            let mut f1 = Vec::new();
            let mut secs = Vec::new();
            for (cell, res) in cells.iter().zip(&results) {
                if cell.3 == r {
                    f1.push(res.f1[m]);
                    secs.push(res.seconds[m]);
                }
            }
            let (mean, std) = mean_std(&f1);
            rows.push(ExperimentRow {
                missing_rate: rate,
                method: method.name(),
                mean_micro_f1: mean,
                std_micro_f1: std,
                mean_train_seconds: secs.iter().sum::<f64>() / secs.len() as f64,
                runs: f1,
            });
        }
    }
    Ok(ExperimentTable { rows })
}
