//! Problem layer for the particle-in-a-box eigenvalue problem: trial
//! solutions that satisfy boundary conditions by construction, equation
//! residuals, the probability regularizer, total-loss assembly, and the
//! analytic reference solutions.
//!
//! In natural units (hbar = m = 1) the box problem on `[0, a]` reads
//! `-psi''/2 = E psi` with `psi(0) = psi(a) = 0`; the analytic
//! eigenfunctions are `sqrt(2/a) sin(n pi x / a)` with eigenenergies
//! `n^2 pi^2 / (2 a^2)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::numerics::{
    Grid, Quadrature, SampledFunction, integrate_with, second_derivative,
};

/// Loss assigned when the integrated probability is not positive, so the
/// optimizer is pushed off the trivial all-zero solution instead of the
/// run aborting.
pub const PROBABILITY_PENALTY: f64 = 1e12;

/// Value of the regularizer at its minimum p = 1.
pub const REGULARIZATION_FLOOR: f64 = 51.875;

/// Coefficients of the power/inverse-power regularization ladder. Each
/// coefficient is the previous one divided by 2(alpha + 1), so the term
/// with exponent alpha + 1 contributes half as much as the term with
/// exponent alpha.
pub const REG_COEFFS: [f64; 4] = [20.0, 5.0, 5.0 / 6.0, 5.0 / 48.0];

#[derive(Debug, Clone, PartialEq)]
pub enum SchrodingerError {
    DegenerateBoundary { x0: f64 },
    GridMismatch,
    NonPositiveProbability { p: f64 },
    BadProblem(String),
}

impl fmt::Display for SchrodingerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchrodingerError::DegenerateBoundary { x0 } => {
                write!(f, "boundary points coincide at x = {x0}")
            }
            SchrodingerError::GridMismatch => write!(f, "sampled functions live on different grids"),
            SchrodingerError::NonPositiveProbability { p } => {
                write!(f, "integrated probability {p} is not positive")
            }
            SchrodingerError::BadProblem(msg) => write!(f, "bad problem: {msg}"),
        }
    }
}

impl std::error::Error for SchrodingerError {}

/// Prescribed endpoint values `f(x0) = u0`, `f(x1) = u1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryConditions {
    pub x0: f64,
    pub u0: f64,
    pub x1: f64,
    pub u1: f64,
}

impl BoundaryConditions {
    pub fn new(x0: f64, u0: f64, x1: f64, u1: f64) -> Result<Self, SchrodingerError> {
        if x0 == x1 {
            return Err(SchrodingerError::DegenerateBoundary { x0 });
        }
        Ok(BoundaryConditions { x0, u0, x1, u1 })
    }

    /// Homogeneous box conditions psi(0) = psi(a) = 0.
    pub fn boxed(a: f64) -> Self {
        BoundaryConditions {
            x0: 0.0,
            u0: 0.0,
            x1: a,
            u1: 0.0,
        }
    }
}

/// Particle-in-a-box setup. The quantum number only selects the analytic
/// reference and the energy search window; the optimizer itself never
/// sees it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiabProblem {
    pub box_length: f64,
    pub quantum_number: usize,
    pub energy_init: (f64, f64),
}

impl PiabProblem {
    pub fn new(
        box_length: f64,
        quantum_number: usize,
        energy_init: (f64, f64),
    ) -> Result<Self, SchrodingerError> {
        if box_length <= 0.0 {
            return Err(SchrodingerError::BadProblem("box length must be positive".into()));
        }
        if quantum_number == 0 {
            return Err(SchrodingerError::BadProblem("quantum number must be >= 1".into()));
        }
        if !(energy_init.1 > energy_init.0) {
            return Err(SchrodingerError::BadProblem(
                "energy init interval is degenerate".into(),
            ));
        }
        Ok(PiabProblem {
            box_length,
            quantum_number,
            energy_init,
        })
    }
}

/// Components of the total loss for one candidate wavefunction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    /// Integral of the squared equation residual.
    pub residual_integral: f64,
    /// Integrated probability density p.
    pub probability: f64,
    /// R(p), or the penalty value when p is not positive.
    pub regularization: f64,
    /// residual_integral + regularization.
    pub total: f64,
    /// True when the p <= 0 penalty path was taken.
    pub penalized: bool,
}

/// Transform a raw network output into a candidate that satisfies the
/// boundary conditions identically:
/// `u1 (x-x0)/(x1-x0) + u0 (x-x1)/(x0-x1) + (x-x0)(x-x1) u(x)`.
pub fn trial_solution(
    u_raw: &SampledFunction,
    bc: &BoundaryConditions,
) -> Result<SampledFunction, SchrodingerError> {
    let g = u_raw.grid();
    if g.x0() != bc.x0 || g.x1() != bc.x1 {
        return Err(SchrodingerError::GridMismatch);
    }
    let span = bc.x1 - bc.x0;
    let values = g
        .nodes()
        .iter()
        .zip(u_raw.values())
        .map(|(&x, &u)| {
            bc.u1 * (x - bc.x0) / span + bc.u0 * (x - bc.x1) / (-span)
                + (x - bc.x0) * (x - bc.x1) * u
        })
        .collect();
    Ok(SampledFunction::new(g.clone(), values).expect("same grid"))
}

/// Residual of the generic second-order problem
/// `f'' + a f' + b f - c = 0`, scored on interior nodes only (endpoints
/// are pinned by the trial construction and carry zero residual weight).
pub fn generic_residual(
    f: &SampledFunction,
    a_coef: f64,
    b_coef: f64,
    c_coef: f64,
) -> SampledFunction {
    let d1 = crate::numerics::derivative(f);
    let d2 = second_derivative(f);
    let m = f.grid().len();
    let mut values = vec![0.0; m];
    for i in 1..m - 1 {
        values[i] = d2.values()[i] + a_coef * d1.values()[i] + b_coef * f.values()[i] - c_coef;
    }
    SampledFunction::new(f.grid().clone(), values).expect("same grid")
}

/// Residual of the box Schrödinger equation `-psi''/2 - E psi` on
/// interior nodes, zero at the endpoints.
pub fn piab_residual(psi_hat: &SampledFunction, energy: f64) -> SampledFunction {
    let d2 = second_derivative(psi_hat);
    let m = psi_hat.grid().len();
    let mut values = vec![0.0; m];
    for i in 1..m - 1 {
        values[i] = -0.5 * d2.values()[i] - energy * psi_hat.values()[i];
    }
    SampledFunction::new(psi_hat.grid().clone(), values).expect("same grid")
}

/// Integrated probability density `p = ∫ psi^2 dx` over the grid.
pub fn probability(psi_hat: &SampledFunction) -> f64 {
    probability_with(psi_hat, Quadrature::Trapezoid)
}

pub fn probability_with(psi_hat: &SampledFunction, rule: Quadrature) -> f64 {
    let sq = SampledFunction::new(
        psi_hat.grid().clone(),
        psi_hat.values().iter().map(|v| v * v).collect(),
    )
    .expect("same grid");
    integrate_with(&sq, rule)
}

/// Probability regularizer
/// `R(p) = (1-p)^2 + 20/p + 5/p^2 + (5/6)/p^3 + (5/48)/p^4
///        + 20p + 5p^2 + (5/6)p^3 + (5/48)p^4`.
///
/// The inverse terms forbid the trivial psi = 0, the polynomial terms
/// stop p from exploding, and p = 1 is the stationary minimum with
/// R(1) = 51.875. Terms are summed as symmetric pairs
/// `c_a (p^a + p^-a)`, smallest coefficients first, which keeps R(1)
/// exact in floating point.
pub fn regularization(p: f64) -> Result<f64, SchrodingerError> {
    if !(p > 0.0) {
        return Err(SchrodingerError::NonPositiveProbability { p });
    }
    let pairs: [f64; 4] = std::array::from_fn(|i| {
        let a = (i + 1) as i32;
        p.powi(a) + p.powi(-a)
    });
    let q = 1.0 - p;
    let mut r = q * q;
    r += REG_COEFFS[2] * pairs[2];
    r += REG_COEFFS[3] * pairs[3];
    r += REG_COEFFS[1] * pairs[1];
    r += REG_COEFFS[0] * pairs[0];
    Ok(r)
}

/// Assemble the full loss from a raw network output: apply the trial
/// construction, then score the equation residual plus the probability
/// regularizer.
pub fn total_loss(
    u_raw: &SampledFunction,
    energy: f64,
    bc: &BoundaryConditions,
    rule: Quadrature,
) -> Result<LossBreakdown, SchrodingerError> {
    let psi_hat = trial_solution(u_raw, bc)?;
    Ok(total_loss_of_trial(&psi_hat, energy, rule))
}

/// Loss of an already-constructed candidate. This seam lets tests feed
/// analytic wavefunctions straight in, bypassing the trial construction.
pub fn total_loss_of_trial(
    psi_hat: &SampledFunction,
    energy: f64,
    rule: Quadrature,
) -> LossBreakdown {
    let residual = piab_residual(psi_hat, energy);
    let res_sq = SampledFunction::new(
        residual.grid().clone(),
        residual.values().iter().map(|v| v * v).collect(),
    )
    .expect("same grid");
    let residual_integral = integrate_with(&res_sq, rule);
    let p = probability_with(psi_hat, rule);
    match regularization(p) {
        Ok(r) => LossBreakdown {
            residual_integral,
            probability: p,
            regularization: r,
            total: residual_integral + r,
            penalized: false,
        },
        Err(_) => LossBreakdown {
            residual_integral,
            probability: p,
            regularization: PROBABILITY_PENALTY,
            total: residual_integral + PROBABILITY_PENALTY,
            penalized: true,
        },
    }
}

/// Analytic eigenfunction `sqrt(2/a) sin(n pi x / a)` sampled on a grid.
pub fn analytic_wavefunction(n: usize, a: f64, grid: &Grid) -> SampledFunction {
    let amp = (2.0 / a).sqrt();
    let k = n as f64 * std::f64::consts::PI / a;
    SampledFunction::from_fn(grid.clone(), |x| amp * (k * x).sin())
}

/// Analytic eigenenergy `n^2 pi^2 / (2 a^2)` in natural units.
pub fn analytic_energy(n: usize, a: f64) -> f64 {
    let n = n as f64;
    n * n * std::f64::consts::PI * std::f64::consts::PI / (2.0 * a * a)
}

/// Max-node error between a candidate and a reference, minimized over the
/// global sign (the equation is invariant under psi -> -psi, so
/// out-of-phase solutions count as correct).
pub fn phase_aligned_error(
    psi_hat: &SampledFunction,
    psi_ref: &SampledFunction,
) -> Result<f64, SchrodingerError> {
    if !psi_hat.grid().same_as(psi_ref.grid()) {
        return Err(SchrodingerError::GridMismatch);
    }
    let err = |s: f64| {
        psi_hat
            .values()
            .iter()
            .zip(psi_ref.values())
            .map(|(a, b)| (s * a - b).abs())
            .fold(0.0f64, f64::max)
    };
    Ok(err(1.0).min(err(-1.0)))
}
