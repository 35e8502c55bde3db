//! `smile` command-line interface.
//!
//! Exit codes: 0 ok, 1 parse or I/O error, 2 invalid flags, 3 training
//! divergence, 4 dimension mismatch, 5 alignment mismatch.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use tempfile::NamedTempFile;

use crate::data::{
    mask_labels, parse_dataset, parse_label_sets, write_dataset, write_label_sets, MaskSpec,
    MultiLabelDataset,
};
use crate::error::{Error, Result};
use crate::eval::{
    bench_scaling, generate, micro_f1, run_missing_rate_experiment, write_bench_csv,
    BenchConfig, ExperimentGrid, SyntheticConfig,
};
use crate::pu::{CEstimateConfig, SGDConfig};
use crate::stacking::{load_model, save_model, train_stacked_timed};
use crate::{Augmentation, CMode, StackConfig};

#[derive(Debug, Parser)]
#[command(name = "smile", version, about = "Multi-label learning with missing labels")]
struct Cli {
    /// Root seed for every random choice.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Worker threads: a positive integer or `auto`.
    #[arg(long, global = true, default_value = "auto", value_parser = parse_threads)]
    threads: Threads,
    /// Only log errors.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy)]
enum Threads {
    Auto,
    Fixed(usize),
}

fn parse_threads(s: &str) -> std::result::Result<Threads, String> {
    if s == "auto" {
        return Ok(Threads::Auto);
    }
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(Threads::Fixed(n)),
        _ => Err(format!("expected a positive integer or `auto`, got `{s}`")),
    }
}

#[derive(Debug, Clone, Copy)]
enum CArg {
    PerLabel,
    Global,
    Value(f64),
}

fn parse_c(s: &str) -> std::result::Result<CArg, String> {
    match s {
        "per-label" => Ok(CArg::PerLabel),
        "global" => Ok(CArg::Global),
        _ => match s.parse::<f64>() {
            Ok(c) if c > 0.0 && c <= 1.0 => Ok(CArg::Value(c)),
            Ok(c) => Err(format!("c must be in (0, 1], got {c}")),
            Err(_) => Err(format!("expected `per-label`, `global` or a value in (0, 1], got `{s}`")),
        },
    }
}

fn parse_augment(s: &str) -> std::result::Result<Augmentation, String> {
    Augmentation::from_name(s).ok_or_else(|| format!("unknown augmentation `{s}`"))
}

fn parse_unit(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if (0.0..=1.0).contains(&v) => Ok(v),
        _ => Err(format!("expected a value in [0, 1], got `{s}`")),
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Hide a fraction of the positive labels.
    Mask {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        labels: usize,
        #[arg(long, value_parser = parse_unit)]
        missing_rate: f64,
        /// Write the hidden (instance, label) pairs here.
        #[arg(long)]
        audit: Option<PathBuf>,
    },
    /// Train a stacked model.
    Train {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        labels: usize,
        /// Feature dimension (default: largest index in the input).
        #[arg(long)]
        features: Option<usize>,
        #[arg(long)]
        model_out: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Predict label sets with a saved model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        /// Append the label probabilities to each line.
        #[arg(long)]
        probs: bool,
    },
    /// Micro-F1 of predicted label sets against the truth.
    Evaluate {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        labels: usize,
    },
    /// Micro-F1 across missing rates under outer cross-validation.
    Experiment {
        /// Dataset with complete labels; synthetic data is generated when absent.
        #[arg(long, requires = "labels")]
        input: Option<PathBuf>,
        #[arg(long)]
        labels: Option<usize>,
        #[command(flatten)]
        synthetic: SyntheticArgs,
        #[arg(long, value_delimiter = ',', default_value = "0,0.2,0.4,0.6")]
        rates: Vec<f64>,
        /// Outer cross-validation folds.
        #[arg(long, default_value_t = 10)]
        outer_folds: usize,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        /// Leave out the c = 1 logistic comparator.
        #[arg(long)]
        no_logistic: bool,
        /// Run cells one at a time.
        #[arg(long)]
        sequential: bool,
        #[arg(long)]
        output: PathBuf,
        /// Plot data (`x y` pairs per method).
        #[arg(long)]
        plot: Option<PathBuf>,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Training time against the number of instances.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "10000,20000,40000")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        dim: usize,
        #[arg(long, default_value_t = 10)]
        labels: usize,
        #[arg(long, default_value_t = 20)]
        nnz: usize,
        #[arg(long, default_value_t = 0.8)]
        correlation: f64,
        #[arg(long, default_value_t = 0.5)]
        noise: f64,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
    },
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[arg(long, default_value_t = 1)]
    levels: usize,
    /// Cross-validation folds for the stacked features.
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, default_value_t = 10)]
    epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    lr: f64,
    #[arg(long, default_value_t = 1e-6)]
    l2: f64,
    /// `per-label`, `global`, or a fixed value in (0, 1].
    #[arg(long, default_value = "per-label", value_parser = parse_c)]
    c: CArg,
    /// `probability` or `hard-sign`.
    #[arg(long, default_value = "probability", value_parser = parse_augment)]
    augment: Augmentation,
    /// Reuse the level-0 c estimates at every level.
    #[arg(long)]
    freeze_c: bool,
}

#[derive(Debug, Args)]
struct SyntheticArgs {
    #[arg(long, default_value_t = 5000)]
    n: usize,
    #[arg(long, default_value_t = 50)]
    d: usize,
    #[arg(long, default_value_t = 10)]
    q: usize,
    #[arg(long, default_value_t = 0.8)]
    correlation: f64,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
}

impl ModelArgs {
    fn stack_config(&self, seed: u64) -> Result<StackConfig> {
        let cfg = StackConfig {
            num_stack_levels: self.levels,
            cv_folds: self.folds,
            sgd: SGDConfig {
                epochs: self.epochs,
                learning_rate: self.lr,
                l2_penalty: self.l2,
                rng_seed: seed,
                ..SGDConfig::default()
            },
            c_mode: match self.c {
                CArg::PerLabel => CMode::PerLabel,
                CArg::Global => CMode::Global,
                CArg::Value(c) => CMode::Fixed(c),
            },
            c_estimate: CEstimateConfig {
                rng_seed: seed,
                ..CEstimateConfig::default()
            },
            augmentation: self.augment,
            freeze_c: self.freeze_c,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } | Error::ModelFormat(_) | Error::Io(_) => 1,
        Error::InvalidConfig(_) | Error::NoHeldOutPositives => 2,
        Error::Divergence(_) => 3,
        Error::DimensionMismatch { .. } => 4,
        Error::Alignment(_) => 5,
    }
}

/// Runs the CLI on the process arguments and returns the exit code.
pub fn main() -> i32 {
    run(std::env::args_os())
}

/// Runs the CLI on `args` (the first item is the program name).
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let level = if cli.quiet { "error" } else { "info" };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .try_init();

    let threads = match cli.threads {
        Threads::Auto => 0,
        Threads::Fixed(n) => n,
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    let seed = cli.seed;
    match &cli.command {
        Command::Mask {
            input,
            output,
            labels,
            missing_rate,
            audit,
        } => cmd_mask(input, output, *labels, *missing_rate, audit.as_deref(), seed),
        Command::Train {
            input,
            labels,
            features,
            model_out,
            model,
        } => cmd_train(input, *labels, *features, model_out, model, seed),
        Command::Predict {
            model,
            input,
            output,
            threshold,
            probs,
        } => cmd_predict(model, input, output, *threshold, *probs),
        Command::Evaluate { pred, truth, labels } => cmd_evaluate(pred, truth, *labels),
        Command::Experiment {
            input,
            labels,
            synthetic,
            rates,
            outer_folds,
            threshold,
            no_logistic,
            sequential,
            output,
            plot,
            model,
        } => {
            let ds = match (input, labels) {
                (Some(path), Some(q)) => read_dataset(path, *q, None)?,
                _ => generate(&SyntheticConfig::new(
                    synthetic.n,
                    synthetic.d,
                    synthetic.q,
                    synthetic.correlation,
                    synthetic.noise,
                    seed,
                ))?,
            };
            let grid = ExperimentGrid {
                missing_rates: rates.clone(),
                folds: *outer_folds,
                seeds: vec![seed],
                stack: model.stack_config(seed)?,
                threshold: *threshold,
                include_logistic: !no_logistic,
                sequential: *sequential,
            };
            let table = run_missing_rate_experiment(&ds, &grid)?;
            write_atomic(output, |w| table.write_csv(w))?;
            if let Some(plot) = plot {
                write_atomic(plot, |w| table.write_plot_data(w))?;
            }
            for row in &table.rows {
                println!(
                    "{} {}: micro_f1 {:.4} +- {:.4}",
                    row.missing_rate, row.method, row.mean_micro_f1, row.std_micro_f1
                );
            }
            Ok(())
        }
        Command::Bench {
            sizes,
            dim,
            labels,
            nnz,
            correlation,
            noise,
            repeats,
            output,
            model,
        } => {
            let cfg = BenchConfig {
                sizes: sizes.clone(),
                dim: *dim,
                num_labels: *labels,
                nnz_per_instance: *nnz,
                correlation: *correlation,
                noise: *noise,
                stack: model.stack_config(seed)?,
                repeats: *repeats,
                seed,
            };
            let rows = bench_scaling(&cfg)?;
            write_atomic(output, |w| write_bench_csv(&rows, w))?;
            for r in &rows {
                match r.time_ratio {
                    Some(t) => println!("n {}: {:.3}s (x{:.2})", r.n, r.train_seconds, t),
                    None => println!("n {}: {:.3}s", r.n, r.train_seconds),
                }
            }
            Ok(())
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn read_dataset(path: &Path, q: usize, d: Option<usize>) -> Result<MultiLabelDataset> {
    if q == 0 {
        return Err(Error::InvalidConfig("--labels must be at least 1".into()));
    }
    parse_dataset(open(path)?, q, d)
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<&mut NamedTempFile>) -> Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir)?;
    {
        let mut w = BufWriter::new(&mut tmp);
        body(&mut w)?;
        w.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn cmd_mask(
    input: &Path,
    output: &Path,
    q: usize,
    rate: f64,
    audit: Option<&Path>,
    seed: u64,
) -> Result<()> {
    let spec = MaskSpec::new(rate, seed)?;
    let ds = read_dataset(input, q, None)?;
    let masked = mask_labels(&ds, &spec)?;
    write_atomic(output, |w| write_dataset(&masked.dataset, w))?;
    if let Some(audit) = audit {
        write_atomic(audit, |w| masked.write_audit(w))?;
    }
    println!(
        "positives: {} -> {}",
        ds.observed_positive_count(),
        masked.dataset.observed_positive_count()
    );
    Ok(())
}

fn cmd_train(
    input: &Path,
    q: usize,
    features: Option<usize>,
    model_out: &Path,
    args: &ModelArgs,
    seed: u64,
) -> Result<()> {
    let cfg = args.stack_config(seed)?;
    let ds = read_dataset(input, q, features)?;
    log::info!(
        "{} instances, {} features, {} labels, {} observed positives",
        ds.num_instances(),
        ds.num_features(),
        ds.num_labels(),
        ds.observed_positive_count()
    );
    let (model, times) = train_stacked_timed(&ds, &cfg)?;
    write_atomic(model_out, |w| save_model(&model, w))?;
    for (level, (models, t)) in model.levels().iter().zip(&times).enumerate() {
        let mut cs: Vec<f64> = models.iter().map(|m| m.label_frequency_c()).collect();
        cs.sort_by(f64::total_cmp);
        println!(
            "level {level}: {:.3}s  c min {:.4} median {:.4} max {:.4}",
            t.as_secs_f64(),
            cs[0],
            median(&cs),
            cs[cs.len() - 1]
        );
    }
    Ok(())
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn cmd_predict(
    model_path: &Path,
    input: &Path,
    output: &Path,
    threshold: f64,
    probs: bool,
) -> Result<()> {
    if !threshold.is_finite() {
        return Err(Error::InvalidConfig(format!("threshold {threshold} is not finite")));
    }
    let model = load_model(open(model_path)?)?;
    let ds = read_dataset(input, model.num_labels(), None)?;
    if ds.num_features() > model.base_features() {
        return Err(Error::DimensionMismatch {
            expected: model.base_features(),
            found: ds.num_features(),
        });
    }
    let start = Instant::now();
    let preds = model.predict_dataset(&ds, threshold)?;
    log::info!(
        "predicted {} instances in {:.3}s",
        preds.len(),
        start.elapsed().as_secs_f64()
    );
    let labels: Vec<_> = preds.iter().map(|p| p.labels.clone()).collect();
    let probabilities: Vec<Vec<f64>> = preds.iter().map(|p| p.probabilities().to_vec()).collect();
    write_atomic(output, |w| {
        write_label_sets(&labels, probs.then_some(probabilities.as_slice()), w)
    })
}

fn cmd_evaluate(pred: &Path, truth: &Path, q: usize) -> Result<()> {
    if q == 0 {
        return Err(Error::InvalidConfig("--labels must be at least 1".into()));
    }
    let predictions = parse_label_sets(open(pred)?, q)?;
    let truth = parse_label_sets(open(truth)?, q)?;
    let report = micro_f1(&predictions, &truth)?;
    println!("micro_f1: {:?}", report.micro_f1);
    println!("micro_precision: {:?}", report.micro_precision);
    println!("micro_recall: {:?}", report.micro_recall);
    println!("true_positive_total: {}", report.true_positive_total);
    println!("predicted_positive_total: {}", report.predicted_positive_total);
    println!("actual_positive_total: {}", report.actual_positive_total);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_flag_values() {
        assert!(matches!(parse_c("per-label"), Ok(CArg::PerLabel)));
        assert!(matches!(parse_c("global"), Ok(CArg::Global)));
        assert!(matches!(parse_c("1.0"), Ok(CArg::Value(c)) if c == 1.0));
        assert!(parse_c("0").is_err());
        assert!(parse_c("1.5").is_err());
        assert!(parse_c("half").is_err());
    }

    #[test]
    fn thread_flag_values() {
        assert!(matches!(parse_threads("auto"), Ok(Threads::Auto)));
        assert!(matches!(parse_threads("3"), Ok(Threads::Fixed(3))));
        assert!(parse_threads("0").is_err());
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[1.0, 2.0, 4.0]), 2.0);
        assert_eq!(median(&[1.0, 2.0, 4.0, 8.0]), 3.0);
    }

    #[test]
    fn missing_flag_is_usage_error() {
        assert_eq!(run(["smile", "mask", "--input", "a", "--output", "b", "--missing-rate", "0.2"]), 2);
    }
}
