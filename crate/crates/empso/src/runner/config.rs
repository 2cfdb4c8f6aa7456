//! Flat `key=value` run configuration.
//!
//! The format is a plain text file: one `key=value` per line, `#` lines
//! are comments, unknown keys are rejected so typos fail loudly. Every
//! key has a default except `problem`.
//!
//! Keys: `problem` (piab | generic_bvp | bench:<sphere|rastrigin|rosenbrock>),
//! `n`, `grid_m`, `layers` (comma-separated widths), `activation`
//! (tanh | sigmoid), `beta`, `c1`, `c2`, `swarm_size`, `max_iters`,
//! `seed`, `energy_init_lo`, `energy_init_hi`, `weight_init_lo`,
//! `weight_init_hi`, `out_dir`, `history_stride`, `quadrature`
//! (trapezoid | simpson), `seeds_best_of`, `bench_dim`, and the generic
//! BVP coefficients `bvp_a`, `bvp_b`, `bvp_c`, `bvp_f0`, `bvp_f1`.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::net::Activation;
use crate::numerics::Quadrature;
use crate::runner::bench::BenchFunction;
use crate::schrodinger::analytic_energy;

/// Default experiment knobs: momentum 0.9 with cognitive 0.8 and social
/// 0.9 (inside the stable region), a 101-node grid, a [1, 16, 16, 1] tanh
/// network, and 50 particles.
pub const DEFAULT_BETA: f64 = 0.9;
pub const DEFAULT_C1: f64 = 0.8;
pub const DEFAULT_C2: f64 = 0.9;
pub const DEFAULT_GRID_M: usize = 101;
pub const DEFAULT_SWARM_SIZE: usize = 50;
pub const DEFAULT_SEED: u64 = 42;
/// Weight/bias init interval. Chosen so the raw network output can reach
/// the sqrt(2)-amplitude states through the (x - x0)(x - x1) envelope
/// without saturating the hidden tanh layers.
pub const DEFAULT_WEIGHT_INIT: (f64, f64) = (-3.0, 3.0);

#[derive(Debug)]
pub enum ConfigError {
    Io(std::io::Error),
    Parse { line: usize, content: String },
    UnknownKey { key: String },
    BadValue { key: String, message: String },
    MissingKey { key: String },
    Invalid { key: String, message: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(e) => write!(f, "cannot read config: {e}"),
            ConfigError::Parse { line, content } => {
                write!(f, "line {line} is not a key=value pair: {content:?}")
            }
            ConfigError::UnknownKey { key } => write!(f, "unknown key {key:?}"),
            ConfigError::BadValue { key, message } => {
                write!(f, "bad value for {key:?}: {message}")
            }
            ConfigError::MissingKey { key } => write!(f, "missing required key {key:?}"),
            ConfigError::Invalid { key, message } => {
                write!(f, "invalid {key:?}: {message}")
            }
        }
    }
}

impl std::error::Error for ConfigError {}

impl From<std::io::Error> for ConfigError {
    fn from(e: std::io::Error) -> Self {
        ConfigError::Io(e)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    Piab,
    GenericBvp,
    Bench(BenchFunction),
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Problem::Piab => write!(f, "piab"),
            Problem::GenericBvp => write!(f, "generic_bvp"),
            Problem::Bench(b) => write!(f, "bench:{b}"),
        }
    }
}

/// Generic BVP `f'' + a f' + b f - c = 0` with endpoint values f0, f1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BvpSpec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub f0: f64,
    pub f1: f64,
}

impl Default for BvpSpec {
    fn default() -> Self {
        // f'' = 2 with zero endpoints; exact solution x^2 - x
        BvpSpec {
            a: 0.0,
            b: 0.0,
            c: 2.0,
            f0: 0.0,
            f1: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub problem: Problem,
    pub quantum_number: usize,
    pub grid_m: usize,
    pub layers: Vec<usize>,
    pub activation: Activation,
    pub beta: f64,
    pub c1: f64,
    pub c2: f64,
    pub swarm_size: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub energy_init: (f64, f64),
    pub weight_init: (f64, f64),
    pub out_dir: PathBuf,
    pub history_stride: usize,
    pub quadrature: Quadrature,
    pub seeds_best_of: usize,
    pub bench_dim: usize,
    pub bvp: BvpSpec,
}

impl RunConfig {
    /// Defaults for a given problem; `max_iters` and the energy window
    /// depend on the target quantum number (5000 iterations with E in
    /// [4, 6] for the ground state, 10000 with [19, 21] for n = 2).
    pub fn defaults(problem: Problem, n: usize) -> RunConfig {
        let (max_iters, energy_init) = match n {
            1 => (5000, (4.0, 6.0)),
            2 => (10_000, (19.0, 21.0)),
            n => {
                let e = analytic_energy(n, 1.0);
                (10_000, (e - 1.0, e + 1.0))
            }
        };
        RunConfig {
            problem,
            quantum_number: n,
            grid_m: DEFAULT_GRID_M,
            layers: vec![1, 16, 16, 1],
            activation: Activation::Tanh,
            beta: DEFAULT_BETA,
            c1: DEFAULT_C1,
            c2: DEFAULT_C2,
            swarm_size: DEFAULT_SWARM_SIZE,
            max_iters,
            seed: DEFAULT_SEED,
            energy_init,
            weight_init: DEFAULT_WEIGHT_INIT,
            out_dir: PathBuf::from("runs"),
            history_stride: 10,
            quadrature: Quadrature::Trapezoid,
            seeds_best_of: 3,
            bench_dim: 5,
            bvp: BvpSpec::default(),
        }
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut entries: HashMap<String, String> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Parse {
                line: idx + 1,
                content: raw.to_string(),
            });
        };
        entries.insert(key.trim().to_string(), value.trim().to_string());
    }

    const KNOWN: &[&str] = &[
        "problem",
        "n",
        "grid_m",
        "layers",
        "activation",
        "beta",
        "c1",
        "c2",
        "swarm_size",
        "max_iters",
        "seed",
        "energy_init_lo",
        "energy_init_hi",
        "weight_init_lo",
        "weight_init_hi",
        "out_dir",
        "history_stride",
        "quadrature",
        "seeds_best_of",
        "bench_dim",
        "bvp_a",
        "bvp_b",
        "bvp_c",
        "bvp_f0",
        "bvp_f1",
    ];
    if let Some(key) = entries.keys().find(|k| !KNOWN.contains(&k.as_str())) {
        return Err(ConfigError::UnknownKey { key: key.clone() });
    }

    let problem = match entries.get("problem").map(String::as_str) {
        None => return Err(ConfigError::MissingKey { key: "problem".into() }),
        Some("piab") => Problem::Piab,
        Some("generic_bvp") => Problem::GenericBvp,
        Some(s) if s.starts_with("bench:") => {
            let name = &s["bench:".len()..];
            Problem::Bench(name.parse().map_err(|message| ConfigError::BadValue {
                key: "problem".into(),
                message,
            })?)
        }
        Some(other) => {
            return Err(ConfigError::BadValue {
                key: "problem".into(),
                message: format!(
                    "{other:?} is not piab, generic_bvp, or bench:<function>"
                ),
            });
        }
    };

    let n: usize = parse_entry(&entries, "n", 1)?;
    if n == 0 {
        return Err(ConfigError::Invalid {
            key: "n".into(),
            message: "quantum number must be >= 1".into(),
        });
    }
    let mut cfg = RunConfig::defaults(problem, n);

    cfg.grid_m = parse_entry(&entries, "grid_m", cfg.grid_m)?;
    cfg.beta = parse_entry(&entries, "beta", cfg.beta)?;
    cfg.c1 = parse_entry(&entries, "c1", cfg.c1)?;
    cfg.c2 = parse_entry(&entries, "c2", cfg.c2)?;
    cfg.swarm_size = parse_entry(&entries, "swarm_size", cfg.swarm_size)?;
    cfg.max_iters = parse_entry(&entries, "max_iters", cfg.max_iters)?;
    cfg.seed = parse_entry(&entries, "seed", cfg.seed)?;
    cfg.energy_init.0 = parse_entry(&entries, "energy_init_lo", cfg.energy_init.0)?;
    cfg.energy_init.1 = parse_entry(&entries, "energy_init_hi", cfg.energy_init.1)?;
    cfg.weight_init.0 = parse_entry(&entries, "weight_init_lo", cfg.weight_init.0)?;
    cfg.weight_init.1 = parse_entry(&entries, "weight_init_hi", cfg.weight_init.1)?;
    cfg.history_stride = parse_entry(&entries, "history_stride", cfg.history_stride)?;
    cfg.seeds_best_of = parse_entry(&entries, "seeds_best_of", cfg.seeds_best_of)?;
    cfg.bench_dim = parse_entry(&entries, "bench_dim", cfg.bench_dim)?;
    cfg.bvp.a = parse_entry(&entries, "bvp_a", cfg.bvp.a)?;
    cfg.bvp.b = parse_entry(&entries, "bvp_b", cfg.bvp.b)?;
    cfg.bvp.c = parse_entry(&entries, "bvp_c", cfg.bvp.c)?;
    cfg.bvp.f0 = parse_entry(&entries, "bvp_f0", cfg.bvp.f0)?;
    cfg.bvp.f1 = parse_entry(&entries, "bvp_f1", cfg.bvp.f1)?;

    if let Some(v) = entries.get("out_dir") {
        cfg.out_dir = PathBuf::from(v);
    }
    if let Some(v) = entries.get("layers") {
        let widths: Result<Vec<usize>, _> = v.split(',').map(|t| t.trim().parse()).collect();
        cfg.layers = widths.map_err(|e| ConfigError::BadValue {
            key: "layers".into(),
            message: format!("{e}"),
        })?;
    }
    if let Some(v) = entries.get("activation") {
        cfg.activation = match v.as_str() {
            "tanh" => Activation::Tanh,
            "sigmoid" => Activation::Sigmoid,
            other => {
                return Err(ConfigError::BadValue {
                    key: "activation".into(),
                    message: format!("{other:?} is not tanh or sigmoid"),
                });
            }
        };
    }
    if let Some(v) = entries.get("quadrature") {
        cfg.quadrature = match v.as_str() {
            "trapezoid" => Quadrature::Trapezoid,
            "simpson" => Quadrature::Simpson,
            other => {
                return Err(ConfigError::BadValue {
                    key: "quadrature".into(),
                    message: format!("{other:?} is not trapezoid or simpson"),
                });
            }
        };
    }

    validate(&cfg)?;
    Ok(cfg)
}

fn parse_entry<T: std::str::FromStr>(
    entries: &HashMap<String, String>,
    key: &str,
    default: T,
) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    match entries.get(key) {
        None => Ok(default),
        Some(v) => v.parse().map_err(|e| ConfigError::BadValue {
            key: key.into(),
            message: format!("{e}"),
        }),
    }
}

fn validate(cfg: &RunConfig) -> Result<(), ConfigError> {
    let invalid = |key: &str, message: String| {
        Err(ConfigError::Invalid {
            key: key.into(),
            message,
        })
    };
    if !(cfg.beta > 0.0 && cfg.beta < 1.0) {
        return invalid(
            "beta",
            format!(
                "beta = {} violates the stability condition 0 < beta < 1",
                cfg.beta
            ),
        );
    }
    let c_sum = cfg.c1 + cfg.c2;
    if !(0.0..=2.0).contains(&c_sum) {
        return invalid(
            "c1",
            format!(
                "c1 + c2 = {c_sum} violates the stability condition 0 <= c1 + c2 <= 2"
            ),
        );
    }
    if cfg.grid_m < 5 {
        return invalid("grid_m", "need at least 5 grid nodes".into());
    }
    if cfg.layers.len() < 3 || cfg.layers.first() != Some(&1) || cfg.layers.last() != Some(&1) {
        return invalid(
            "layers",
            "widths must start and end at 1 with at least one hidden layer".into(),
        );
    }
    if cfg.layers.iter().any(|&w| w == 0) {
        return invalid("layers", "zero-width layer".into());
    }
    if cfg.swarm_size == 0 {
        return invalid("swarm_size", "must be >= 1".into());
    }
    if cfg.max_iters == 0 {
        return invalid("max_iters", "must be >= 1".into());
    }
    if !(cfg.energy_init.1 > cfg.energy_init.0) {
        return invalid("energy_init_lo", "energy interval is empty".into());
    }
    if !(cfg.weight_init.1 >= cfg.weight_init.0) {
        return invalid("weight_init_lo", "weight interval is empty".into());
    }
    if cfg.history_stride == 0 {
        return invalid("history_stride", "must be >= 1".into());
    }
    if cfg.seeds_best_of == 0 {
        return invalid("seeds_best_of", "must be >= 1".into());
    }
    if cfg.bench_dim == 0 {
        return invalid("bench_dim", "must be >= 1".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_piab_config_gets_paper_defaults() {
        let cfg = parse_config("problem=piab\nn=1\n").unwrap();
        assert_eq!(cfg.beta, 0.9);
        assert_eq!(cfg.c1, 0.8);
        assert_eq!(cfg.c2, 0.9);
        assert_eq!(cfg.grid_m, 101);
        assert_eq!(cfg.max_iters, 5000);
        assert_eq!(cfg.energy_init, (4.0, 6.0));
        assert_eq!(cfg.layers, vec![1, 16, 16, 1]);
        assert_eq!(cfg.swarm_size, 50);
        assert_eq!(cfg.seeds_best_of, 3);
    }

    #[test]
    fn excited_state_defaults() {
        let cfg = parse_config("problem=piab\nn=2\n").unwrap();
        assert_eq!(cfg.max_iters, 10_000);
        assert_eq!(cfg.energy_init, (19.0, 21.0));
    }

    #[test]
    fn beta_outside_stable_range_is_rejected() {
        let err = parse_config("problem=piab\nbeta=1.2\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("stability"), "{msg}");
        assert!(msg.contains("beta"), "{msg}");
    }

    #[test]
    fn acceleration_sum_is_checked() {
        let err = parse_config("problem=piab\nc1=1.5\nc2=1.0\n").unwrap_err();
        assert!(err.to_string().contains("c1 + c2"));
    }

    #[test]
    fn unknown_key_is_rejected() {
        let err = parse_config("problem=piab\nswarm=50\n").unwrap_err();
        assert!(matches!(err, ConfigError::UnknownKey { key } if key == "swarm"));
    }

    #[test]
    fn missing_problem_is_rejected() {
        assert!(matches!(
            parse_config("n=1\n"),
            Err(ConfigError::MissingKey { .. })
        ));
    }

    #[test]
    fn malformed_line_reports_location() {
        let err = parse_config("problem=piab\nno equals sign\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 2, .. }));
    }

    #[test]
    fn comments_and_blanks_are_ignored() {
        let cfg = parse_config("# a comment\n\nproblem=piab\n  # indented comment\nseed=7\n").unwrap();
        assert_eq!(cfg.seed, 7);
    }

    #[test]
    fn bench_problem_parses() {
        let cfg = parse_config("problem=bench:sphere\nbench_dim=7\nmax_iters=100\n").unwrap();
        assert_eq!(cfg.problem, Problem::Bench(BenchFunction::Sphere));
        assert_eq!(cfg.bench_dim, 7);
        assert!(parse_config("problem=bench:nope\n").is_err());
    }

    #[test]
    fn layers_and_quadrature_parse() {
        let cfg =
            parse_config("problem=piab\nlayers=1, 8, 8, 1\nquadrature=simpson\nactivation=sigmoid\n")
                .unwrap();
        assert_eq!(cfg.layers, vec![1, 8, 8, 1]);
        assert_eq!(cfg.quadrature, Quadrature::Simpson);
        assert_eq!(cfg.activation, Activation::Sigmoid);
        assert!(parse_config("problem=piab\nlayers=1,0,1\n").is_err());
        assert!(parse_config("problem=piab\nlayers=2,4,1\n").is_err());
    }

    #[test]
    fn generic_bvp_defaults() {
        let cfg = parse_config("problem=generic_bvp\n").unwrap();
        assert_eq!(cfg.bvp, BvpSpec::default());
        let cfg = parse_config("problem=generic_bvp\nbvp_c=4.0\nbvp_f1=1.0\n").unwrap();
        assert_eq!(cfg.bvp.c, 4.0);
        assert_eq!(cfg.bvp.f1, 1.0);
    }
}
