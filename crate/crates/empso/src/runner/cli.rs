//! Command-line interface.
//!
//! Subcommands: `solve <config>` runs the configured experiment
//! (best-of-N seeds) and exports CSVs, `validate <config>` parses and
//! checks a config without running, `stability` prints the closed-form
//! verdict and amplification analysis for a hyperparameter triple, and
//! `bench` exercises the optimizer on a standard test function.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 runtime failure.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::runner::bench::{bench_optimizer, seed_ladder};
use crate::runner::config::load_config;
use crate::runner::experiment::run_best_of;
use crate::runner::export::export_all;
use crate::stability::{lambda_coefficients, simulate_deterministic, verdict};

#[derive(Parser)]
#[command(name = "empso", version, about = "Swarm-trained network solver for the particle-in-a-box eigenproblem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file and export CSVs.
    Solve { config: PathBuf },
    /// Parse and validate a config file without running it.
    Validate { config: PathBuf },
    /// Closed-form stability verdict and amplification factors for one
    /// hyperparameter triple.
    Stability {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        c1: f64,
        #[arg(long)]
        c2: f64,
        /// Also iterate the deterministic recurrence for this many steps.
        #[arg(long)]
        simulate: Option<usize>,
    },
    /// Benchmark the optimizer on sphere | rastrigin | rosenbrock.
    Bench {
        function: String,
        #[arg(long, default_value_t = 5)]
        dim: usize,
        #[arg(long, default_value_t = 500)]
        iters: usize,
        #[arg(long, default_value_t = 10)]
        seeds: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

/// Entry point shared by `main` and the tests.
pub fn cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own usage text; fold every parse problem
            // into the validation exit code
            let _ = e.print();
            return 1;
        }
    };
    match cli.command {
        Command::Solve { config } => solve(&config),
        Command::Validate { config } => match load_config(&config) {
            Ok(cfg) => {
                println!("ok: {} (n = {}, {} iterations)", cfg.problem, cfg.quantum_number, cfg.max_iters);
                0
            }
            Err(e) => {
                eprintln!("invalid config: {e}");
                1
            }
        },
        Command::Stability { beta, c1, c2, simulate } => {
            stability(beta, c1, c2, simulate);
            0
        }
        Command::Bench { function, dim, iters, seeds, seed } => {
            bench(&function, dim, iters, seeds, seed)
        }
    }
}

fn solve(config_path: &std::path::Path) -> i32 {
    let cfg = match load_config(config_path) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("invalid config: {e}");
            return 1;
        }
    };
    let outcome = match run_best_of(&cfg) {
        Ok(outcome) => outcome,
        Err(e) => {
            eprintln!("run failed: {e}");
            return 2;
        }
    };
    for record in &outcome.records {
        println!(
            "seed {}: loss {:.7}, evaluations {}, {:.1}s",
            record.seed, record.best_fitness, record.fitness_evaluations, record.wall_clock_seconds
        );
    }
    let accepted = outcome.accepted_record();
    println!("accepted seed {} (lowest final loss)", accepted.seed);
    if let Some(e) = accepted.learned_energy {
        println!("learned E = {e:.7}");
    }
    if let Some(lb) = &accepted.final_loss {
        println!(
            "total loss = {:.7}, residual integral = {:.7}, probability = {:.7}",
            lb.total, lb.residual_integral, lb.probability
        );
    }
    match export_all(accepted, &cfg.out_dir) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("export failed: {e}");
            2
        }
    }
}

fn stability(beta: f64, c1: f64, c2: f64, simulate: Option<usize>) {
    let co = lambda_coefficients(beta, c1, c2);
    let v = verdict(beta, c1, c2);
    println!(
        "beta = {beta}, c1 = {c1}, c2 = {c2} -> {}",
        if v.closed_form_stable { "stable" } else { "unstable" }
    );
    println!("{co}");
    println!("max |A| = {:.9}", v.max_amplification);
    for root in v.roots {
        println!("  A = {:.9} {:+.9}i (|A| = {:.9})", root.re, root.im, root.norm());
    }
    if let Some(steps) = simulate {
        let t = simulate_deterministic(beta, c1, c2, 0.0, 0.0, [1.0, 1.0, 1.0], steps);
        println!(
            "recurrence from (1, 1, 1), {} steps: max |x| = {:.6e}, final x = {:.6e}{}",
            steps,
            t.max_abs(),
            t.final_value(),
            if t.diverged { " (diverged)" } else { "" }
        );
    }
}

fn bench(function: &str, dim: usize, iters: usize, seeds: usize, seed: u64) -> i32 {
    let function = match function.parse() {
        Ok(f) => f,
        Err(e) => {
            eprintln!("{e}");
            return 1;
        }
    };
    match bench_optimizer(function, dim, iters, &seed_ladder(seed, seeds)) {
        Ok(summary) => {
            for r in &summary.results {
                println!(
                    "seed {}: best {:.6e} ({} evaluations)",
                    r.seed, r.best_fitness, r.evaluations
                );
            }
            println!("median best = {:.6e}", summary.median_best);
            0
        }
        Err(e) => {
            eprintln!("bench failed: {e}");
            2
        }
    }
}
