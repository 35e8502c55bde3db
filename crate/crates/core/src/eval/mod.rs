//! Evaluation: Micro-F1, a synthetic correlated-label generator, the
//! missing-rate experiment and the training-time scaling benchmark.

mod bench;
mod experiment;
mod metrics;
mod synthetic;

pub use bench::{bench_scaling, write_bench_csv, BenchConfig, BenchRow};
pub use experiment::{
    run_missing_rate_experiment, ExperimentGrid, ExperimentRow, ExperimentTable, Method,
};
pub use metrics::{micro_f1, EvalReport};
pub use synthetic::{generate, generate_synthetic, SyntheticConfig};
