//! Von-Neumann-style stability analysis of the deterministic optimizer
//! dynamics (fixed personal and global bests).
//!
//! Three views of the same question, kept deliberately independent so
//! disagreements surface in data instead of being reconciled in code:
//!
//! 1. [`is_stable`] — the closed-form region test `0 < beta < 1` and
//!    `0 <= c1 + c2 <= 2`.
//! 2. [`amplification_roots`] — roots of the characteristic cubic
//!    `A^3 - l1 A^2 + l2 A - l3 = 0` of the homogenized scheme, solved
//!    via companion-matrix eigenvalues with Newton polish.
//! 3. [`simulate_deterministic`] — direct iteration of the third-order
//!    difference scheme
//!    `x[d+1] = l1 x[d] - l2 x[d-1] - l3 x[d-2] + c1 p1 + c2 p2`.
//!
//! The three do not agree everywhere. When `c1 + c2 < 2 beta (1 - beta)`
//! the cubic in (2) evaluates negatively at A = 1 and therefore has a
//! real root above 1 even though the point passes the closed-form test;
//! the simulated recurrence (3) nevertheless stays bounded on the whole
//! closed-form region, and its empirical divergence onset sits at
//! `c1 + c2 = 4 - 4 beta + 2 beta^2` (where its own characteristic
//! polynomial acquires a root at -1), not at the box edge 2. Tests pin
//! both discrepancies rather than hiding them.

use std::fmt;

use num_complex::Complex64;

/// Coefficients of the homogenized difference scheme:
/// `l1 = 2 - beta - c1 - c2`, `l2 = (1 - beta)^2`, `l3 = beta (1 - beta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeCoefficients {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
}

impl fmt::Display for SchemeCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "lambda1 = {}, lambda2 = {}, lambda3 = {}",
            self.lambda1, self.lambda2, self.lambda3
        )
    }
}

pub fn lambda_coefficients(beta: f64, c1: f64, c2: f64) -> SchemeCoefficients {
    let one_minus = 1.0 - beta;
    SchemeCoefficients {
        lambda1: 2.0 - beta - c1 - c2,
        lambda2: one_minus * one_minus,
        lambda3: beta * one_minus,
    }
}

/// Closed-form hyperparameter region test: `0 < beta < 1` and
/// `0 <= c1 + c2 <= 2`.
pub fn is_stable(beta: f64, c1: f64, c2: f64) -> bool {
    beta > 0.0 && beta < 1.0 && (0.0..=2.0).contains(&(c1 + c2))
}

/// All three roots of the monic cubic `A^3 - l1 A^2 + l2 A - l3 = 0`,
/// sorted by real part then imaginary part. Each returned root satisfies
/// the cubic with residual magnitude at most 1e-9.
///
/// Closed form on the depressed cubic (trigonometric branch for three
/// real roots, cancellation-safe Cardano otherwise) followed by a Newton
/// polish on the original polynomial. Closed form is used instead of
/// companion-matrix eigenvalues because QR-type eigeniterations are not
/// guaranteed to terminate on the nilpotent companion of degenerate
/// cubics such as l = (0, 0, 0).
pub fn amplification_roots(coeffs: &SchemeCoefficients) -> [Complex64; 3] {
    let (l1, l2, l3) = (coeffs.lambda1, coeffs.lambda2, coeffs.lambda3);
    // monic form A^3 + a A^2 + b A + c
    let (a, b, c) = (-l1, l2, -l3);
    // depress with A = t - a/3: t^3 + p t + q
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;

    let mut roots: [Complex64; 3];
    let half_q = q / 2.0;
    let disc = half_q * half_q + (p / 3.0) * (p / 3.0) * (p / 3.0);
    if p == 0.0 && q == 0.0 {
        roots = [Complex64::new(-shift, 0.0); 3];
    } else if disc > 0.0 {
        // one real root; take the larger-magnitude cube root first to
        // avoid cancellation, recover the partner from u*v = -p/3
        let s = disc.sqrt();
        let w = if q >= 0.0 { -half_q - s } else { -half_q + s };
        let u = w.cbrt();
        let v = if u == 0.0 { 0.0 } else { -p / (3.0 * u) };
        let real_t = u + v;
        let re = -real_t / 2.0;
        let im = (u - v) * 3f64.sqrt() / 2.0;
        roots = [
            Complex64::new(real_t - shift, 0.0),
            Complex64::new(re - shift, im),
            Complex64::new(re - shift, -im),
        ];
    } else {
        // three real roots (casus irreducibilis): trigonometric form
        let r = (-p / 3.0).sqrt();
        let arg = (3.0 * q / (2.0 * p) / r).clamp(-1.0, 1.0);
        let theta = arg.acos();
        roots = std::array::from_fn(|k| {
            let angle = (theta - 2.0 * std::f64::consts::PI * k as f64) / 3.0;
            Complex64::new(2.0 * r * angle.cos() - shift, 0.0)
        });
    }

    let poly = |z: Complex64| ((z - l1) * z + l2) * z - l3;
    let dpoly = |z: Complex64| (3.0 * z - 2.0 * l1) * z + l2;
    for z in roots.iter_mut() {
        // Newton polish; near multiple roots dpoly is tiny and the closed
        // form already carries a tiny residual
        for _ in 0..8 {
            let pz = poly(*z);
            let dz = dpoly(*z);
            if pz.norm() < 1e-14 || dz.norm() < 1e-12 {
                break;
            }
            let next = *z - pz / dz;
            if poly(next).norm() >= pz.norm() {
                break;
            }
            *z = next;
        }
    }
    roots.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    roots
}

/// Combined report: region test plus the cubic-root check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityVerdict {
    pub closed_form_stable: bool,
    /// Largest root modulus of the characteristic cubic.
    pub max_amplification: f64,
    pub roots: [Complex64; 3],
}

pub fn verdict(beta: f64, c1: f64, c2: f64) -> StabilityVerdict {
    let roots = amplification_roots(&lambda_coefficients(beta, c1, c2));
    StabilityVerdict {
        closed_form_stable: is_stable(beta, c1, c2),
        max_amplification: roots.iter().map(|r| r.norm()).fold(0.0, f64::max),
        roots,
    }
}

/// Trajectory of the deterministic scheme. `diverged` is set when a step
/// overflowed to a non-finite value and iteration stopped early.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub values: Vec<f64>,
    pub diverged: bool,
}

impl Trajectory {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()))
    }

    pub fn final_value(&self) -> f64 {
        *self.values.last().expect("seeded with three values")
    }
}

/// Iterate the third-order scheme exactly as written, keeping the
/// constant forcing `c1 p1 + c2 p2` so fixed-point behaviour is directly
/// observable (`p1 = p2 = 0` recovers the homogeneous scheme). The three
/// seed positions are the scheme's memory; `values` starts with them.
pub fn simulate_deterministic(
    beta: f64,
    c1: f64,
    c2: f64,
    p1: f64,
    p2: f64,
    x_init: [f64; 3],
    steps: usize,
) -> Trajectory {
    let co = lambda_coefficients(beta, c1, c2);
    let forcing = c1 * p1 + c2 * p2;
    let mut values = Vec::with_capacity(steps + 3);
    values.extend_from_slice(&x_init);
    for _ in 0..steps {
        let n = values.len();
        let x = co.lambda1 * values[n - 1] - co.lambda2 * values[n - 2]
            - co.lambda3 * values[n - 3]
            + forcing;
        if !x.is_finite() {
            return Trajectory {
                values,
                diverged: true,
            };
        }
        values.push(x);
    }
    Trajectory {
        values,
        diverged: false,
    }
}

/// `c1 + c2` value at which the simulated scheme's characteristic
/// polynomial acquires a root at -1 for the given `beta`; trajectories
/// diverge beyond it. Equals 2 only in the `beta -> 1` limit.
pub fn divergence_onset(beta: f64) -> f64 {
    4.0 - 4.0 * beta + 2.0 * beta * beta
}

/// `(beta, c1 + c2)` grid covering the closed-form stable box:
/// beta in {0.05, 0.15, ..., 0.95} times c1 + c2 in {0.1, 0.3, ..., 1.9}.
pub fn stable_grid() -> Vec<(f64, f64)> {
    let mut pts = Vec::with_capacity(100);
    for i in 0..10 {
        let beta = 0.05 + 0.1 * i as f64;
        for j in 0..10 {
            let c_sum = 0.1 + 0.2 * j as f64;
            pts.push((beta, c_sum));
        }
    }
    pts
}

/// Sampled parameter sets on which the simulated recurrence genuinely
/// diverges. Every point has `c1 + c2 >= 2.25`, outside the guard band
/// around the region edge, and sits above [`divergence_onset`] for its
/// beta; the tail entries probe `beta >= 1`.
pub fn divergent_samples() -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = (1..=9)
        .map(|i| {
            let beta = 0.1 * i as f64;
            (beta, (divergence_onset(beta) + 0.25).max(2.25))
        })
        .collect();
    pts.push((0.95, 2.25));
    pts.extend([(1.0, 2.5), (1.2, 3.0), (1.5, 2.5)]);
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(co: &SchemeCoefficients, z: Complex64) -> f64 {
        (((z - co.lambda1) * z + co.lambda2) * z - co.lambda3).norm()
    }

    #[test]
    fn lambda_values_for_chosen_hyperparameters() {
        let co = lambda_coefficients(0.9, 0.8, 0.9);
        assert!((co.lambda1 - (-0.6)).abs() <= 1e-12);
        assert!((co.lambda2 - 0.01).abs() <= 1e-12);
        assert!((co.lambda3 - 0.09).abs() <= 1e-12);
    }

    #[test]
    fn lambda_collapses_at_beta_extremes() {
        let co = lambda_coefficients(0.0, 0.3, 0.4);
        assert_eq!(co.lambda2, 1.0);
        assert_eq!(co.lambda3, 0.0);
        let co = lambda_coefficients(1.0, 0.0, 0.0);
        assert_eq!(co.lambda1, 1.0);
        assert_eq!(co.lambda2, 0.0);
        assert_eq!(co.lambda3, 0.0);
    }

    #[test]
    fn roots_of_zero_cubic() {
        let roots = amplification_roots(&SchemeCoefficients {
            lambda1: 0.0,
            lambda2: 0.0,
            lambda3: 0.0,
        });
        for r in roots {
            assert!(r.norm() <= 1e-6, "{r}");
        }
    }

    #[test]
    fn roots_of_factored_cubic() {
        // (A-1)(A-2)(A-3) = A^3 - 6A^2 + 11A - 6
        let co = SchemeCoefficients {
            lambda1: 6.0,
            lambda2: 11.0,
            lambda3: 6.0,
        };
        let roots = amplification_roots(&co);
        for (root, expected) in roots.iter().zip([1.0, 2.0, 3.0]) {
            assert!((root.re - expected).abs() <= 1e-9, "{root} vs {expected}");
            assert!(root.im.abs() <= 1e-9);
            assert!(residual(&co, *root) <= 1e-9);
        }
    }

    #[test]
    fn chosen_hyperparameters_have_contractive_roots() {
        let v = verdict(0.9, 0.8, 0.9);
        assert!(v.closed_form_stable);
        assert!(v.max_amplification <= 1.0 + 1e-9, "{}", v.max_amplification);
    }

    #[test]
    fn root_residuals_across_parameter_sweep() {
        for i in 0..20 {
            for j in 0..20 {
                let beta = 0.05 * (i as f64 + 0.5);
                let c_sum = 0.2 * j as f64;
                let co = lambda_coefficients(beta, c_sum / 2.0, c_sum / 2.0);
                for r in amplification_roots(&co) {
                    assert!(
                        residual(&co, r) <= 1e-9,
                        "beta={beta} c={c_sum}: residual {}",
                        residual(&co, r)
                    );
                }
            }
        }
    }

    #[test]
    fn region_test_examples() {
        assert!(is_stable(0.9, 0.8, 0.9));
        assert!(!is_stable(1.0, 0.5, 0.5));
        assert!(!is_stable(0.5, 1.5, 1.0));
        assert!(is_stable(0.5, 1.0, 1.0)); // c1 + c2 = 2 inclusive
        assert!(!is_stable(-0.1, 0.5, 0.5));
    }

    #[test]
    fn cubic_disagrees_with_region_test_at_small_attraction() {
        // For c1 + c2 < 2 beta (1 - beta) the cubic evaluates negatively
        // at A = 1, so a real root exceeds 1 inside the closed-form
        // region. Pinned: (beta, c1+c2) = (0.5, 0.1) gives max |A| ~ 1.352.
        let v = verdict(0.5, 0.05, 0.05);
        assert!(v.closed_form_stable);
        assert!(
            (1.3..=1.4).contains(&v.max_amplification),
            "{}",
            v.max_amplification
        );
        // while the simulated scheme at the same point stays bounded
        let t = simulate_deterministic(0.5, 0.05, 0.05, 0.0, 0.0, [1.0, 1.0, 1.0], 10_000);
        assert!(!t.diverged && t.max_abs() <= 10.0);
    }

    #[test]
    fn fixed_point_is_preserved() {
        let (c1, c2, p1, p2) = (0.8, 0.9, 1.0, 2.0);
        let x_star = (c1 * p1 + c2 * p2) / (c1 + c2);
        let t = simulate_deterministic(0.9, c1, c2, p1, p2, [x_star; 3], 1000);
        assert!(!t.diverged);
        for v in &t.values {
            assert!((v - x_star).abs() <= 1e-9, "{v} vs {x_star}");
        }
    }

    #[test]
    fn stable_parameters_contract_to_zero() {
        let t = simulate_deterministic(0.9, 0.8, 0.9, 0.0, 0.0, [1.0, 1.0, 1.0], 1000);
        assert!(!t.diverged);
        assert!(t.max_abs() <= 10.0);
        assert!(t.final_value().abs() <= 1e-3);
    }

    #[test]
    fn unstable_parameters_blow_up() {
        let t = simulate_deterministic(0.5, 2.0, 1.5, 0.0, 0.0, [1.0, 1.0, 1.0], 1000);
        assert!(t.diverged || t.max_abs() > 1e6);
    }

    #[test]
    fn divergence_onset_brackets_behaviour() {
        for beta in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let onset = divergence_onset(beta);
            let below = simulate_deterministic(
                beta,
                (onset - 0.05) / 2.0,
                (onset - 0.05) / 2.0,
                0.0,
                0.0,
                [1.0, 1.0, 1.0],
                5000,
            );
            assert!(!below.diverged && below.max_abs() <= 1e3, "beta={beta} below");
            let above = simulate_deterministic(
                beta,
                (onset + 0.05) / 2.0,
                (onset + 0.05) / 2.0,
                0.0,
                0.0,
                [1.0, 1.0, 1.0],
                5000,
            );
            assert!(
                above.diverged || above.max_abs() > 1e6,
                "beta={beta} above"
            );
        }
    }

    #[test]
    fn grids_have_expected_shape() {
        let stable = stable_grid();
        assert_eq!(stable.len(), 100);
        assert!(stable.iter().all(|&(b, c)| is_stable(b, c / 2.0, c / 2.0)));
        let divergent = divergent_samples();
        assert!(divergent.iter().all(|&(_, c)| c >= 2.2));
    }

    #[test]
    fn zero_steps_returns_seeds() {
        let t = simulate_deterministic(0.5, 0.5, 0.5, 0.0, 0.0, [1.0, 2.0, 3.0], 0);
        assert_eq!(t.values, vec![1.0, 2.0, 3.0]);
        assert!(!t.diverged);
    }
}
