//! Exponentially averaged momentum particle swarm optimization.
//!
//! Velocity updates add an exponentially weighted average of past
//! velocities instead of a plain inertia term:
//!
//! ```text
//! M_i <- beta * M_i + (1 - beta) * v_i          (momentum, uses old v)
//! v_i <- M_i + c1 r1 (P_i - x_i) + c2 r2 (G - x_i)
//! x_i <- x_i + v_i
//! ```
//!
//! The momentum line runs before the velocity line within an iteration,
//! following the numbered update equations.
//!
//! Determinism contract: every random draw for iteration `d` comes from a
//! counter-based stream keyed on `(seed, particle index, d)`, generated
//! before fitness evaluation, and the global-best reduction is an ordered
//! fold over particle indices. Results are therefore bit-identical no
//! matter how fitness evaluations are scheduled — the rayon path and the
//! sequential path produce the same output.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub enum SwarmError {
    BadHyper(String),
    DimensionMismatch { expected: usize, got: usize },
    EmptyHistory,
}

impl fmt::Display for SwarmError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SwarmError::BadHyper(msg) => write!(f, "bad hyperparameters: {msg}"),
            SwarmError::DimensionMismatch { expected, got } => {
                write!(f, "dimension {got} does not match the {expected} init bounds")
            }
            SwarmError::EmptyHistory => write!(f, "velocity history is empty"),
        }
    }
}

impl std::error::Error for SwarmError {}

/// Optional plateau detection for [`optimize`]: stop when the global best
/// has improved by less than `tol` over the last `window` iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EarlyStop {
    pub window: usize,
    pub tol: f64,
}

/// Optimizer knobs. `beta` must lie strictly inside (0, 1); the default
/// constructor also requires `0 <= c1 + c2 <= 2`, the stable region of
/// the underlying difference scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperParams {
    beta: f64,
    c1: f64,
    c2: f64,
    swarm_size: usize,
    max_iters: usize,
    seed: u64,
    init_bounds: Vec<(f64, f64)>,
    early_stop: Option<EarlyStop>,
}

impl HyperParams {
    pub fn new(
        beta: f64,
        c1: f64,
        c2: f64,
        swarm_size: usize,
        max_iters: usize,
        seed: u64,
        init_bounds: Vec<(f64, f64)>,
    ) -> Result<Self, SwarmError> {
        let sum = c1 + c2;
        if !(0.0..=2.0).contains(&sum) {
            return Err(SwarmError::BadHyper(format!(
                "c1 + c2 = {sum} outside the stable range [0, 2]; use \
                 new_with_unstable_coefficients to bypass"
            )));
        }
        Self::new_with_unstable_coefficients(beta, c1, c2, swarm_size, max_iters, seed, init_bounds)
    }

    /// Like [`HyperParams::new`] but skips the `c1 + c2` stability check.
    /// Intended for experiments that deliberately probe the unstable
    /// region; `beta` is still required to lie in (0, 1).
    pub fn new_with_unstable_coefficients(
        beta: f64,
        c1: f64,
        c2: f64,
        swarm_size: usize,
        max_iters: usize,
        seed: u64,
        init_bounds: Vec<(f64, f64)>,
    ) -> Result<Self, SwarmError> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(SwarmError::BadHyper(format!(
                "beta = {beta} outside the stable range (0, 1)"
            )));
        }
        if swarm_size == 0 {
            return Err(SwarmError::BadHyper("swarm_size must be >= 1".into()));
        }
        if max_iters == 0 {
            return Err(SwarmError::BadHyper("max_iters must be >= 1".into()));
        }
        if let Some((lo, hi)) = init_bounds.iter().find(|(lo, hi)| !(lo <= hi)) {
            return Err(SwarmError::BadHyper(format!(
                "init interval [{lo}, {hi}] has lower > upper"
            )));
        }
        Ok(HyperParams {
            beta,
            c1,
            c2,
            swarm_size,
            max_iters,
            seed,
            init_bounds,
            early_stop: None,
        })
    }

    pub fn with_early_stop(mut self, window: usize, tol: f64) -> Self {
        self.early_stop = Some(EarlyStop { window, tol });
        self
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn swarm_size(&self) -> usize {
        self.swarm_size
    }

    pub fn max_iters(&self) -> usize {
        self.max_iters
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn init_bounds(&self) -> &[(f64, f64)] {
        &self.init_bounds
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub(crate) position: Vec<f64>,
    pub(crate) velocity: Vec<f64>,
    pub(crate) momentum: Vec<f64>,
    pub(crate) pbest_position: Vec<f64>,
    /// Best finite fitness seen by this particle; `f64::INFINITY` until a
    /// finite value is observed.
    pub(crate) pbest_fitness: f64,
}

impl Particle {
    pub fn position(&self) -> &[f64] {
        &self.position
    }

    pub fn velocity(&self) -> &[f64] {
        &self.velocity
    }

    pub fn momentum(&self) -> &[f64] {
        &self.momentum
    }

    pub fn pbest_position(&self) -> &[f64] {
        &self.pbest_position
    }

    pub fn pbest_fitness(&self) -> f64 {
        self.pbest_fitness
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState {
    pub(crate) particles: Vec<Particle>,
    pub(crate) gbest_position: Vec<f64>,
    pub(crate) gbest_fitness: f64,
    pub(crate) iteration: u64,
}

impl SwarmState {
    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn gbest_position(&self) -> &[f64] {
        &self.gbest_position
    }

    pub fn gbest_fitness(&self) -> f64 {
        self.gbest_fitness
    }

    /// Completed iterations (0 right after initialization).
    pub fn iteration(&self) -> u64 {
        self.iteration
    }
}

/// How fitness evaluations are scheduled within one iteration. Results
/// are identical either way; only wall-clock differs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for EvalMode {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            EvalMode::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            EvalMode::Sequential
        }
    }
}

const PURPOSE_INIT: u64 = 0;
const PURPOSE_STEP: u64 = 1;

/// Counter-based stream: ChaCha keyed on `(seed, purpose, particle,
/// iteration)`, so any draw is reachable without sequencing through the
/// rest of the run.
pub(crate) fn stream_rng(seed: u64, purpose: u64, particle: u64, iteration: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&purpose.to_le_bytes());
    key[16..24].copy_from_slice(&particle.to_le_bytes());
    key[24..].copy_from_slice(&iteration.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Componentwise `beta * momentum + (1 - beta) * velocity`.
pub fn momentum_update(momentum: &[f64], velocity: &[f64], beta: f64) -> Vec<f64> {
    momentum
        .iter()
        .zip(velocity)
        .map(|(m, v)| beta * m + (1.0 - beta) * v)
        .collect()
}

/// Closed form of the momentum recursion started from zero momentum:
/// `sum_k beta^k (1 - beta) v[d - k]`. Serves as the independent oracle
/// for iterating [`momentum_update`].
pub fn momentum_closed_form(
    velocity_history: &[Vec<f64>],
    beta: f64,
) -> Result<Vec<f64>, SwarmError> {
    let last = velocity_history.last().ok_or(SwarmError::EmptyHistory)?;
    let dim = last.len();
    let mut out = vec![0.0; dim];
    for (k, v) in velocity_history.iter().rev().enumerate() {
        debug_assert_eq!(v.len(), dim);
        let w = beta.powi(k as i32) * (1.0 - beta);
        for j in 0..dim {
            out[j] += w * v[j];
        }
    }
    Ok(out)
}

/// Place the swarm uniformly inside the init box and evaluate it.
/// Velocities and momenta start at zero; the global best is the argmin of
/// the initial fitnesses with ties broken by lowest particle index.
pub fn init_swarm<F>(hyper: &HyperParams, dim: usize, fitness: &F) -> Result<SwarmState, SwarmError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    init_swarm_with(hyper, dim, fitness, EvalMode::default())
}

pub fn init_swarm_with<F>(
    hyper: &HyperParams,
    dim: usize,
    fitness: &F,
    mode: EvalMode,
) -> Result<SwarmState, SwarmError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if dim != hyper.init_bounds.len() {
        return Err(SwarmError::DimensionMismatch {
            expected: hyper.init_bounds.len(),
            got: dim,
        });
    }
    let make_particle = |i: usize| {
        let mut rng = stream_rng(hyper.seed, PURPOSE_INIT, i as u64, 0);
        let position: Vec<f64> = hyper
            .init_bounds
            .iter()
            .map(|&(lo, hi)| {
                let r: f64 = rng.random();
                lo + r * (hi - lo)
            })
            .collect();
        let fit = fitness(&position);
        Particle {
            pbest_position: position.clone(),
            pbest_fitness: if fit.is_finite() { fit } else { f64::INFINITY },
            position,
            velocity: vec![0.0; dim],
            momentum: vec![0.0; dim],
        }
    };
    let particles: Vec<Particle> = match mode {
        EvalMode::Sequential => (0..hyper.swarm_size).map(make_particle).collect(),
        #[cfg(feature = "parallel")]
        EvalMode::Parallel => (0..hyper.swarm_size)
            .into_par_iter()
            .map(make_particle)
            .collect(),
    };
    let mut gbest_fitness = f64::INFINITY;
    let mut gbest_idx = 0;
    for (i, p) in particles.iter().enumerate() {
        if p.pbest_fitness < gbest_fitness {
            gbest_fitness = p.pbest_fitness;
            gbest_idx = i;
        }
    }
    Ok(SwarmState {
        gbest_position: particles[gbest_idx].pbest_position.clone(),
        gbest_fitness,
        particles,
        iteration: 0,
    })
}

/// Advance the swarm one iteration in place.
pub fn step<F>(state: &mut SwarmState, hyper: &HyperParams, fitness: &F)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    step_with(state, hyper, fitness, EvalMode::default());
}

pub fn step_with<F>(state: &mut SwarmState, hyper: &HyperParams, fitness: &F, mode: EvalMode)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let iteration = state.iteration + 1;
    let gbest = state.gbest_position.clone();
    let (beta, c1, c2, seed) = (hyper.beta, hyper.c1, hyper.c2, hyper.seed);

    let advance = |(i, p): (usize, &mut Particle)| {
        let dim = p.position.len();
        let mut rng = stream_rng(seed, PURPOSE_STEP, i as u64, iteration);
        for j in 0..dim {
            p.momentum[j] = beta * p.momentum[j] + (1.0 - beta) * p.velocity[j];
        }
        // draw order per dimension: r1 then r2
        for j in 0..dim {
            let r1: f64 = rng.random();
            let r2: f64 = rng.random();
            p.velocity[j] = p.momentum[j]
                + c1 * r1 * (p.pbest_position[j] - p.position[j])
                + c2 * r2 * (gbest[j] - p.position[j]);
            p.position[j] += p.velocity[j];
        }
        let fit = fitness(&p.position);
        // non-finite fitness rejects the candidate for pbest purposes;
        // the particle itself keeps moving
        if fit.is_finite() && fit < p.pbest_fitness {
            p.pbest_position.copy_from_slice(&p.position);
            p.pbest_fitness = fit;
        }
    };
    match mode {
        EvalMode::Sequential => state.particles.iter_mut().enumerate().for_each(advance),
        #[cfg(feature = "parallel")]
        EvalMode::Parallel => state
            .particles
            .par_iter_mut()
            .enumerate()
            .for_each(advance),
    }

    // ordered global-best reduction; strict improvement keeps the
    // incumbent on ties
    for p in &state.particles {
        if p.pbest_fitness < state.gbest_fitness {
            state.gbest_fitness = p.pbest_fitness;
            state.gbest_position.copy_from_slice(&p.pbest_position);
        }
    }
    state.iteration = iteration;
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeOutcome {
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    /// Global-best fitness after each executed iteration.
    pub history: Vec<f64>,
}

/// Run the full budget (or until the optional early stop fires) and
/// return the final global best plus the per-iteration history.
pub fn optimize<F>(hyper: &HyperParams, dim: usize, fitness: &F) -> Result<OptimizeOutcome, SwarmError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    optimize_with(hyper, dim, fitness, EvalMode::default(), |_| {})
}

pub fn optimize_with<F, O>(
    hyper: &HyperParams,
    dim: usize,
    fitness: &F,
    mode: EvalMode,
    mut observer: O,
) -> Result<OptimizeOutcome, SwarmError>
where
    F: Fn(&[f64]) -> f64 + Sync,
    O: FnMut(&SwarmState),
{
    let mut state = init_swarm_with(hyper, dim, fitness, mode)?;
    observer(&state);
    let mut history = Vec::with_capacity(hyper.max_iters);
    for _ in 0..hyper.max_iters {
        step_with(&mut state, hyper, fitness, mode);
        history.push(state.gbest_fitness);
        observer(&state);
        if let Some(es) = hyper.early_stop {
            let n = history.len();
            if n >= es.window {
                let improvement = history[n - es.window] - history[n - 1];
                if improvement < es.tol {
                    break;
                }
            }
        }
    }
    Ok(OptimizeOutcome {
        best_position: state.gbest_position,
        best_fitness: state.gbest_fitness,
        history,
    })
}
