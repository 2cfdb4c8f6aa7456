//! Derivative-free solver for the particle-in-a-box Schrödinger
//! eigenproblem.
//!
//! A small feed-forward network represents the wavefunction; a trial
//! construction pins its boundary values; the equation residual plus a
//! probability regularizer form a loss; and an exponentially averaged
//! momentum particle swarm ([`swarm`]) minimizes that loss over the flat
//! weight vector with the eigenvalue appended as one extra search
//! dimension. No gradients anywhere.
//!
//! Modules:
//! - [`swarm`] — the EM-PSO optimizer itself (momentum, velocity,
//!   position updates; deterministic counter-based randomness).
//! - [`stability`] — closed-form hyperparameter region test,
//!   characteristic-cubic amplification factors, and a deterministic
//!   recurrence simulator.
//! - [`net`] — flat-parameter MLP evaluation.
//! - [`numerics`] — grids, finite-difference stencils, quadrature.
//! - [`schrodinger`] — trial solutions, residuals, probability
//!   regularization, loss assembly, analytic references.
//! - [`runner`] — config files, experiment execution, run records, CSV
//!   export, benchmarks, CLI.

pub mod net;
pub mod numerics;
pub mod runner;
pub mod schrodinger;
pub mod stability;
pub mod swarm;
