//! Experiment orchestration: configuration, execution, persistence,
//! CSV export, optimizer benchmarks, and the CLI.

pub mod bench;
pub mod cli;
pub mod config;
pub mod experiment;
pub mod export;

pub use bench::{BenchFunction, BenchSummary, bench_optimizer, seed_ladder};
pub use cli::cli;
pub use config::{ConfigError, Problem, RunConfig, load_config, parse_config};
pub use experiment::{
    BestOfOutcome, HistoryRow, RunError, RunRecord, run_best_of, run_experiment,
    run_experiment_seeded,
};
pub use export::{ExportKind, export_all, export_csv};
