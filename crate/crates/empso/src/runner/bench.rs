//! Benchmark objectives for validating the optimizer independently of
//! the differential-equation stack.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::swarm::{self, HyperParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchFunction {
    Sphere,
    Rastrigin,
    Rosenbrock,
}

impl fmt::Display for BenchFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            BenchFunction::Sphere => "sphere",
            BenchFunction::Rastrigin => "rastrigin",
            BenchFunction::Rosenbrock => "rosenbrock",
        };
        write!(f, "{name}")
    }
}

impl FromStr for BenchFunction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sphere" => Ok(BenchFunction::Sphere),
            "rastrigin" => Ok(BenchFunction::Rastrigin),
            "rosenbrock" => Ok(BenchFunction::Rosenbrock),
            other => Err(format!(
                "{other:?} is not sphere, rastrigin, or rosenbrock"
            )),
        }
    }
}

impl BenchFunction {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            BenchFunction::Sphere => x.iter().map(|v| v * v).sum(),
            BenchFunction::Rastrigin => {
                let a = 10.0;
                a * x.len() as f64
                    + x.iter()
                        .map(|v| v * v - a * (2.0 * std::f64::consts::PI * v).cos())
                        .sum::<f64>()
            }
            BenchFunction::Rosenbrock => x
                .windows(2)
                .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
                .sum(),
        }
    }

    /// Conventional search box per function.
    pub fn init_interval(&self) -> (f64, f64) {
        match self {
            BenchFunction::Sphere => (-5.0, 5.0),
            BenchFunction::Rastrigin => (-5.12, 5.12),
            BenchFunction::Rosenbrock => (-5.0, 10.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedOutcome {
    pub seed: u64,
    pub best_fitness: f64,
    pub evaluations: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSummary {
    pub function: BenchFunction,
    pub dim: usize,
    pub results: Vec<SeedOutcome>,
    pub median_best: f64,
}

/// Run the optimizer on a benchmark function once per seed and summarize.
/// Hyperparameters are the experiment defaults (beta 0.9, c1 0.8, c2 0.9,
/// 50 particles).
pub fn bench_optimizer(
    function: BenchFunction,
    dim: usize,
    iters: usize,
    seeds: &[u64],
) -> Result<BenchSummary, swarm::SwarmError> {
    use std::sync::atomic::{AtomicU64, Ordering};

    let bounds = vec![function.init_interval(); dim];
    let mut results = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let hyper = HyperParams::new(
            super::config::DEFAULT_BETA,
            super::config::DEFAULT_C1,
            super::config::DEFAULT_C2,
            super::config::DEFAULT_SWARM_SIZE,
            iters,
            seed,
            bounds.clone(),
        )?;
        let counter = AtomicU64::new(0);
        let f = |x: &[f64]| {
            counter.fetch_add(1, Ordering::Relaxed);
            function.eval(x)
        };
        let out = swarm::optimize(&hyper, dim, &f)?;
        results.push(SeedOutcome {
            seed,
            best_fitness: out.best_fitness,
            evaluations: counter.into_inner(),
        });
    }
    let mut sorted: Vec<f64> = results.iter().map(|r| r.best_fitness).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median_best = if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
    };
    Ok(BenchSummary {
        function,
        dim,
        results,
        median_best,
    })
}

/// `base, base+1, ...` seed ladder used by benchmarks and best-of runs.
pub fn seed_ladder(base: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|k| base.wrapping_add(k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn function_values_at_known_points() {
        assert_eq!(BenchFunction::Sphere.eval(&[0.0, 0.0]), 0.0);
        assert_eq!(BenchFunction::Sphere.eval(&[1.0, 2.0]), 5.0);
        assert!(BenchFunction::Rastrigin.eval(&[0.0, 0.0, 0.0]).abs() <= 1e-12);
        assert!(BenchFunction::Rosenbrock.eval(&[1.0, 1.0, 1.0]).abs() <= 1e-12);
        assert_eq!(BenchFunction::Rosenbrock.eval(&[0.0, 0.0]), 1.0);
    }

    #[test]
    fn parse_round_trip() {
        for f in [
            BenchFunction::Sphere,
            BenchFunction::Rastrigin,
            BenchFunction::Rosenbrock,
        ] {
            assert_eq!(f.to_string().parse::<BenchFunction>().unwrap(), f);
        }
        assert!("booth".parse::<BenchFunction>().is_err());
    }

    #[test]
    fn one_dim_sphere_is_easy() {
        let summary =
            bench_optimizer(BenchFunction::Sphere, 1, 100, &seed_ladder(42, 10)).unwrap();
        assert!(summary.median_best <= 1e-6, "{}", summary.median_best);
        for r in &summary.results {
            assert_eq!(r.evaluations, 50 * 101);
        }
    }

    #[test]
    fn median_of_even_count() {
        let summary = bench_optimizer(BenchFunction::Sphere, 2, 50, &[1, 2]).unwrap();
        let (a, b) = (
            summary.results[0].best_fitness,
            summary.results[1].best_fitness,
        );
        assert_eq!(summary.median_best, 0.5 * (a + b));
    }
}
