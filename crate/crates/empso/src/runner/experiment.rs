//! Experiment execution: wires the network and loss into a swarm fitness,
//! records per-stride histories, and persists run records.

use std::fmt;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::net::{self, MlpArchitecture, NetError, ParamVector};
use crate::numerics::{Grid, NumericsError, Quadrature, SampledFunction, integrate_with, make_grid};
use crate::runner::config::{BvpSpec, Problem, RunConfig};
use crate::schrodinger::{
    BoundaryConditions, LossBreakdown, SchrodingerError, generic_residual, probability_with,
    total_loss_of_trial, trial_solution,
};
use crate::swarm::{self, EvalMode, HyperParams, SwarmError};

#[derive(Debug)]
pub enum RunError {
    Swarm(SwarmError),
    Net(NetError),
    Numerics(NumericsError),
    Schrodinger(SchrodingerError),
    Io(std::io::Error),
    Json(serde_json::Error),
    NotApplicable(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Swarm(e) => write!(f, "{e}"),
            RunError::Net(e) => write!(f, "{e}"),
            RunError::Numerics(e) => write!(f, "{e}"),
            RunError::Schrodinger(e) => write!(f, "{e}"),
            RunError::Io(e) => write!(f, "io: {e}"),
            RunError::Json(e) => write!(f, "serialization: {e}"),
            RunError::NotApplicable(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for RunError {}

macro_rules! from_err {
    ($variant:ident, $ty:ty) => {
        impl From<$ty> for RunError {
            fn from(e: $ty) -> Self {
                RunError::$variant(e)
            }
        }
    };
}
from_err!(Swarm, SwarmError);
from_err!(Net, NetError);
from_err!(Numerics, NumericsError);
from_err!(Schrodinger, SchrodingerError);
from_err!(Io, std::io::Error);
from_err!(Json, serde_json::Error);

/// One recorded point of the run history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryRow {
    pub iteration: u64,
    pub total: f64,
    pub residual_integral: Option<f64>,
    pub probability: Option<f64>,
    pub regularization: Option<f64>,
    pub energy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavefunctionSamples {
    pub x: Vec<f64>,
    pub psi_hat: Vec<f64>,
}

/// Full output of one seeded run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: RunConfig,
    pub seed: u64,
    /// Network weights for piab / generic_bvp, raw position for bench.
    pub best_params: Vec<f64>,
    pub best_fitness: f64,
    pub learned_energy: Option<f64>,
    pub final_loss: Option<LossBreakdown>,
    pub history: Vec<HistoryRow>,
    pub wavefunction: Option<WavefunctionSamples>,
    pub fitness_evaluations: u64,
    /// Excluded from the reproducibility contract.
    pub wall_clock_seconds: f64,
}

impl RunRecord {
    pub fn record_path(&self) -> PathBuf {
        self.config
            .out_dir
            .join(format!("record_seed{}.json", self.seed))
    }
}

/// Result of a best-of-N protocol run: every seed's record plus the index
/// of the accepted one (lowest final fitness, earliest seed on ties).
#[derive(Debug, Clone)]
pub struct BestOfOutcome {
    pub records: Vec<RunRecord>,
    pub accepted: usize,
}

impl BestOfOutcome {
    pub fn accepted_record(&self) -> &RunRecord {
        &self.records[self.accepted]
    }
}

/// Run one experiment with the config's own seed and persist the record
/// into the output directory.
pub fn run_experiment(config: &RunConfig) -> Result<RunRecord, RunError> {
    run_experiment_seeded(config, config.seed)
}

pub fn run_experiment_seeded(config: &RunConfig, seed: u64) -> Result<RunRecord, RunError> {
    std::fs::create_dir_all(&config.out_dir)?;
    let result = match &config.problem {
        Problem::Piab => run_piab(config, seed),
        Problem::GenericBvp => run_bvp(config, seed),
        Problem::Bench(function) => run_bench(config, *function, seed),
    };
    match result {
        Ok(record) => {
            persist(&record)?;
            Ok(record)
        }
        Err(e) => {
            // flush a marker so aborted runs are visible in the out dir
            let marker = config.out_dir.join(format!("FAILED_seed{seed}"));
            let _ = std::fs::write(marker, format!("{e}\n"));
            Err(e)
        }
    }
}

/// Run `seeds_best_of` experiments on consecutive seeds starting from the
/// config seed. Each record is persisted separately.
pub fn run_best_of(config: &RunConfig) -> Result<BestOfOutcome, RunError> {
    let seeds = super::bench::seed_ladder(config.seed, config.seeds_best_of);
    let mut records = Vec::with_capacity(seeds.len());
    for seed in seeds {
        records.push(run_experiment_seeded(config, seed)?);
    }
    let mut accepted = 0;
    for (i, r) in records.iter().enumerate() {
        if r.best_fitness < records[accepted].best_fitness {
            accepted = i;
        }
    }
    Ok(BestOfOutcome { records, accepted })
}

fn persist(record: &RunRecord) -> Result<(), RunError> {
    let mut text = serde_json::to_string_pretty(record)?;
    text.push('\n');
    std::fs::write(record.record_path(), text)?;
    Ok(())
}

/// Evaluator for the particle-in-a-box fitness: the search vector is the
/// flat network parameters with the trial energy appended as the last
/// dimension.
pub struct PiabEvaluator {
    arch: MlpArchitecture,
    grid: Grid,
    bc: BoundaryConditions,
    quadrature: Quadrature,
}

impl PiabEvaluator {
    pub fn new(config: &RunConfig) -> Result<Self, RunError> {
        Ok(PiabEvaluator {
            arch: MlpArchitecture::new(config.layers.clone(), config.activation)?,
            grid: make_grid(0.0, 1.0, config.grid_m)?,
            bc: BoundaryConditions::boxed(1.0),
            quadrature: config.quadrature,
        })
    }

    pub fn weight_count(&self) -> usize {
        self.arch.param_count()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Search-space dimension: weights plus the energy coordinate.
    pub fn dim(&self) -> usize {
        self.weight_count() + 1
    }

    pub fn split<'v>(&self, v: &'v [f64]) -> (&'v [f64], f64) {
        let (w, e) = v.split_at(self.weight_count());
        (w, e[0])
    }

    pub fn wavefunction(&self, v: &[f64]) -> SampledFunction {
        let (w, _) = self.split(v);
        let u = net::forward_grid(&self.arch, &ParamVector(w.to_vec()), &self.grid)
            .expect("dimension fixed by construction");
        trial_solution(&u, &self.bc).expect("grid matches boundary")
    }

    pub fn breakdown(&self, v: &[f64]) -> (LossBreakdown, f64) {
        let (_, energy) = self.split(v);
        let psi = self.wavefunction(v);
        (total_loss_of_trial(&psi, energy, self.quadrature), energy)
    }

    pub fn fitness(&self, v: &[f64]) -> f64 {
        self.breakdown(v).0.total
    }
}

fn run_piab(config: &RunConfig, seed: u64) -> Result<RunRecord, RunError> {
    let started = Instant::now();
    let eval = PiabEvaluator::new(config)?;
    let mut bounds = vec![config.weight_init; eval.weight_count()];
    bounds.push(config.energy_init);
    let hyper = build_hyper(config, seed, bounds)?;

    let counter = AtomicU64::new(0);
    let fitness = |v: &[f64]| {
        counter.fetch_add(1, Ordering::Relaxed);
        eval.fitness(v)
    };
    let mut history = Vec::new();
    let out = {
        let observer = |state: &swarm::SwarmState| {
            if !due(state.iteration(), config) {
                return;
            }
            let (lb, energy) = eval.breakdown(state.gbest_position());
            history.push(HistoryRow {
                iteration: state.iteration(),
                total: lb.total,
                residual_integral: Some(lb.residual_integral),
                probability: Some(lb.probability),
                regularization: Some(lb.regularization),
                energy: Some(energy),
            });
        };
        swarm::optimize_with(&hyper, eval.dim(), &fitness, EvalMode::default(), observer)?
    };

    let (final_loss, learned_energy) = eval.breakdown(&out.best_position);
    let psi = eval.wavefunction(&out.best_position);
    let (weights, _) = eval.split(&out.best_position);
    Ok(RunRecord {
        config: config.clone(),
        seed,
        best_params: weights.to_vec(),
        best_fitness: out.best_fitness,
        learned_energy: Some(learned_energy),
        final_loss: Some(final_loss),
        history,
        wavefunction: Some(WavefunctionSamples {
            x: eval.grid().nodes().to_vec(),
            psi_hat: psi.values().to_vec(),
        }),
        fitness_evaluations: counter.into_inner(),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Evaluator for the generic boundary-value problem: the loss is the
/// integrated squared residual alone (no probability regularization).
pub struct BvpEvaluator {
    arch: MlpArchitecture,
    grid: Grid,
    bc: BoundaryConditions,
    spec: BvpSpec,
    quadrature: Quadrature,
}

impl BvpEvaluator {
    pub fn new(config: &RunConfig) -> Result<Self, RunError> {
        Ok(BvpEvaluator {
            arch: MlpArchitecture::new(config.layers.clone(), config.activation)?,
            grid: make_grid(0.0, 1.0, config.grid_m)?,
            bc: BoundaryConditions::new(0.0, config.bvp.f0, 1.0, config.bvp.f1)?,
            spec: config.bvp,
            quadrature: config.quadrature,
        })
    }

    pub fn dim(&self) -> usize {
        self.arch.param_count()
    }

    pub fn solution(&self, v: &[f64]) -> SampledFunction {
        let u = net::forward_grid(&self.arch, &ParamVector(v.to_vec()), &self.grid)
            .expect("dimension fixed by construction");
        trial_solution(&u, &self.bc).expect("grid matches boundary")
    }

    pub fn breakdown(&self, v: &[f64]) -> LossBreakdown {
        let f = self.solution(v);
        let res = generic_residual(&f, self.spec.a, self.spec.b, self.spec.c);
        let sq = SampledFunction::new(
            res.grid().clone(),
            res.values().iter().map(|r| r * r).collect(),
        )
        .expect("same grid");
        let ri = integrate_with(&sq, self.quadrature);
        LossBreakdown {
            residual_integral: ri,
            probability: probability_with(&f, self.quadrature),
            regularization: 0.0,
            total: ri,
            penalized: false,
        }
    }
}

fn run_bvp(config: &RunConfig, seed: u64) -> Result<RunRecord, RunError> {
    let started = Instant::now();
    let eval = BvpEvaluator::new(config)?;
    let bounds = vec![config.weight_init; eval.dim()];
    let hyper = build_hyper(config, seed, bounds)?;

    let counter = AtomicU64::new(0);
    let fitness = |v: &[f64]| {
        counter.fetch_add(1, Ordering::Relaxed);
        eval.breakdown(v).total
    };
    let mut history = Vec::new();
    let out = {
        let observer = |state: &swarm::SwarmState| {
            if !due(state.iteration(), config) {
                return;
            }
            let lb = eval.breakdown(state.gbest_position());
            history.push(HistoryRow {
                iteration: state.iteration(),
                total: lb.total,
                residual_integral: Some(lb.residual_integral),
                probability: Some(lb.probability),
                regularization: Some(lb.regularization),
                energy: None,
            });
        };
        swarm::optimize_with(&hyper, eval.dim(), &fitness, EvalMode::default(), observer)?
    };

    let final_loss = eval.breakdown(&out.best_position);
    let f = eval.solution(&out.best_position);
    Ok(RunRecord {
        config: config.clone(),
        seed,
        best_params: out.best_position,
        best_fitness: out.best_fitness,
        learned_energy: None,
        final_loss: Some(final_loss),
        history,
        wavefunction: Some(WavefunctionSamples {
            x: eval.grid.nodes().to_vec(),
            psi_hat: f.values().to_vec(),
        }),
        fitness_evaluations: counter.into_inner(),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    })
}

fn run_bench(
    config: &RunConfig,
    function: super::bench::BenchFunction,
    seed: u64,
) -> Result<RunRecord, RunError> {
    let started = Instant::now();
    let dim = config.bench_dim;
    let bounds = vec![function.init_interval(); dim];
    let hyper = build_hyper(config, seed, bounds)?;

    let counter = AtomicU64::new(0);
    let fitness = |v: &[f64]| {
        counter.fetch_add(1, Ordering::Relaxed);
        function.eval(v)
    };
    let mut history = Vec::new();
    let out = {
        let observer = |state: &swarm::SwarmState| {
            if due(state.iteration(), config) {
                history.push(HistoryRow {
                    iteration: state.iteration(),
                    total: state.gbest_fitness(),
                    residual_integral: None,
                    probability: None,
                    regularization: None,
                    energy: None,
                });
            }
        };
        swarm::optimize_with(&hyper, dim, &fitness, EvalMode::default(), observer)?
    };

    Ok(RunRecord {
        config: config.clone(),
        seed,
        best_params: out.best_position,
        best_fitness: out.best_fitness,
        learned_energy: None,
        final_loss: None,
        history,
        wavefunction: None,
        fitness_evaluations: counter.into_inner(),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    })
}

fn build_hyper(
    config: &RunConfig,
    seed: u64,
    bounds: Vec<(f64, f64)>,
) -> Result<HyperParams, RunError> {
    Ok(HyperParams::new(
        config.beta,
        config.c1,
        config.c2,
        config.swarm_size,
        config.max_iters,
        seed,
        bounds,
    )?)
}

fn due(iteration: u64, config: &RunConfig) -> bool {
    iteration % config.history_stride as u64 == 0 || iteration == config.max_iters as u64
}
