//! Uniform grids, finite-difference derivatives, and quadrature.
//!
//! Everything downstream (network evaluation, residuals, probability
//! integrals) speaks in terms of [`Grid`] and [`SampledFunction`]: a
//! function is just its values on `m` equally spaced nodes over
//! `[x0, x1]`. Derivatives use second-order stencils, integration uses
//! the composite trapezoid rule (Simpson available as a switch).

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum NumericsError {
    /// `x1` must be strictly greater than `x0`.
    BadInterval { x0: f64, x1: f64 },
    /// At least 5 nodes are needed for the interior stencils.
    TooFewNodes { m: usize },
    /// Values length does not match the grid node count.
    LengthMismatch { expected: usize, got: usize },
}

impl fmt::Display for NumericsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumericsError::BadInterval { x0, x1 } => {
                write!(f, "invalid interval: x0 = {x0} must be < x1 = {x1}")
            }
            NumericsError::TooFewNodes { m } => {
                write!(f, "grid needs at least 5 nodes, got {m}")
            }
            NumericsError::LengthMismatch { expected, got } => {
                write!(f, "expected {expected} values, got {got}")
            }
        }
    }
}

impl std::error::Error for NumericsError {}

/// Uniform grid of `m` nodes over `[x0, x1]` with spacing `h = (x1-x0)/(m-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    x0: f64,
    x1: f64,
    m: usize,
    h: f64,
    nodes: Vec<f64>,
}

impl Grid {
    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }

    /// Node count `m`.
    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires m >= 5
    }

    /// Node spacing.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// True when both grids describe the same nodes.
    pub fn same_as(&self, other: &Grid) -> bool {
        self.m == other.m && self.x0 == other.x0 && self.x1 == other.x1
    }
}

/// Build a uniform grid. Endpoints are exact: `nodes[0] == x0` and
/// `nodes[m-1] == x1` with no floating drift.
pub fn make_grid(x0: f64, x1: f64, m: usize) -> Result<Grid, NumericsError> {
    if !(x1 > x0) {
        return Err(NumericsError::BadInterval { x0, x1 });
    }
    if m < 5 {
        return Err(NumericsError::TooFewNodes { m });
    }
    let span = x1 - x0;
    let denom = (m - 1) as f64;
    let mut nodes: Vec<f64> = (0..m).map(|i| x0 + span * (i as f64 / denom)).collect();
    nodes[0] = x0;
    nodes[m - 1] = x1;
    Ok(Grid {
        x0,
        x1,
        m,
        h: span / denom,
        nodes,
    })
}

/// Function values on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self, NumericsError> {
        if values.len() != grid.len() {
            return Err(NumericsError::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(SampledFunction { grid, values })
    }

    /// Evaluate `f` at every node.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        SampledFunction { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// First derivative: central differences at interior nodes, second-order
/// one-sided stencils at the two endpoints.
pub fn derivative(f: &SampledFunction) -> SampledFunction {
    let v = f.values();
    let m = v.len();
    let h = f.grid().h();
    let mut out = vec![0.0; m];
    out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    for i in 1..m - 1 {
        out[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    }
    out[m - 1] = (3.0 * v[m - 1] - 4.0 * v[m - 2] + v[m - 3]) / (2.0 * h);
    SampledFunction {
        grid: f.grid.clone(),
        values: out,
    }
}

/// Second derivative: three-point stencil at interior nodes. Endpoints
/// reuse the nearest interior value; they never enter a loss because the
/// trial construction pins boundary values and residuals are scored on
/// interior nodes only.
pub fn second_derivative(f: &SampledFunction) -> SampledFunction {
    let v = f.values();
    let m = v.len();
    let h2 = f.grid().h() * f.grid().h();
    let mut out = vec![0.0; m];
    for i in 1..m - 1 {
        out[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2;
    }
    out[0] = out[1];
    out[m - 1] = out[m - 2];
    SampledFunction {
        grid: f.grid.clone(),
        values: out,
    }
}

/// Quadrature rule used by [`integrate_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadrature {
    #[default]
    Trapezoid,
    Simpson,
}

/// Composite trapezoid rule.
pub fn integrate(f: &SampledFunction) -> f64 {
    let v = f.values();
    let m = v.len();
    let interior: f64 = v[1..m - 1].iter().sum();
    f.grid().h() * (v[0] / 2.0 + interior + v[m - 1] / 2.0)
}

pub fn integrate_with(f: &SampledFunction, rule: Quadrature) -> f64 {
    match rule {
        Quadrature::Trapezoid => integrate(f),
        Quadrature::Simpson => simpson(f),
    }
}

/// Composite Simpson rule. An odd panel count is handled by Simpson 3/8
/// on the last three panels.
fn simpson(f: &SampledFunction) -> f64 {
    let v = f.values();
    let h = f.grid().h();
    let panels = v.len() - 1;
    let even_panels = if panels % 2 == 0 { panels } else { panels - 3 };
    let mut total = 0.0;
    let mut i = 0;
    while i + 2 <= even_panels {
        total += h / 3.0 * (v[i] + 4.0 * v[i + 1] + v[i + 2]);
        i += 2;
    }
    if panels % 2 != 0 {
        let n = v.len();
        total += 3.0 * h / 8.0 * (v[n - 4] + 3.0 * v[n - 3] + 3.0 * v[n - 2] + v[n - 1]);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_grid(m: usize) -> Grid {
        make_grid(0.0, 1.0, m).unwrap()
    }

    #[test]
    fn grid_basic() {
        let g = unit_grid(101);
        assert_eq!(g.h(), 0.01);
        assert_eq!(g.nodes()[50], 0.5);
        assert_eq!(g.nodes()[0], 0.0);
        assert_eq!(g.nodes()[100], 1.0);
    }

    #[test]
    fn grid_five_nodes() {
        let g = unit_grid(5);
        assert_eq!(g.nodes(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(matches!(
            make_grid(1.0, 0.0, 10),
            Err(NumericsError::BadInterval { .. })
        ));
        assert!(matches!(
            make_grid(0.0, 1.0, 4),
            Err(NumericsError::TooFewNodes { .. })
        ));
    }

    #[test]
    fn sampled_function_length_check() {
        let g = unit_grid(5);
        assert!(SampledFunction::new(g, vec![0.0; 4]).is_err());
    }

    #[test]
    fn derivative_exact_on_quadratics() {
        let f = SampledFunction::from_fn(unit_grid(101), |x| x * x);
        let d = derivative(&f);
        for (x, dv) in f.grid().nodes().iter().zip(d.values()) {
            assert!((dv - 2.0 * x).abs() <= 1e-10, "at x={x}: {dv}");
        }
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let f = SampledFunction::from_fn(unit_grid(21), |_| 3.5);
        assert!(derivative(&f).values().iter().all(|v| v.abs() <= 1e-12));
    }

    #[test]
    fn derivative_sine_error_bound() {
        use std::f64::consts::PI;
        let f = SampledFunction::from_fn(unit_grid(101), |x| (PI * x).sin());
        let d = derivative(&f);
        let mut max_err: f64 = 0.0;
        let mut max_interior: f64 = 0.0;
        for (i, (x, dv)) in f.grid().nodes().iter().zip(d.values()).enumerate() {
            let err = (dv - PI * (PI * x).cos()).abs();
            max_err = max_err.max(err);
            if i > 0 && i < 100 {
                max_interior = max_interior.max(err);
            }
        }
        // Interior central differences meet the h^2 pi^3/6 bound; the
        // one-sided endpoint stencils carry twice that constant and land
        // just above 1e-3 at h = 0.01 (measured 1.034e-3).
        assert!(max_interior <= 1e-3, "interior {max_interior}");
        assert!(max_err <= 1.05e-3, "overall {max_err}");
    }

    #[test]
    fn second_derivative_exact_on_quadratics() {
        let f = SampledFunction::from_fn(unit_grid(101), |x| x * x);
        let d2 = second_derivative(&f);
        for v in &d2.values()[1..100] {
            assert!((v - 2.0).abs() <= 1e-9, "{v}");
        }
    }

    #[test]
    fn second_derivative_zero_on_linear() {
        let f = SampledFunction::from_fn(unit_grid(51), |x| 4.0 - 3.0 * x);
        for v in &d2_interior(&f) {
            assert!(v.abs() <= 1e-10);
        }
    }

    fn d2_interior(f: &SampledFunction) -> Vec<f64> {
        let d2 = second_derivative(f);
        d2.values()[1..f.grid().len() - 1].to_vec()
    }

    #[test]
    fn second_derivative_sine_error_bound() {
        use std::f64::consts::PI;
        let f = SampledFunction::from_fn(unit_grid(101), |x| (PI * x).sin());
        let d2 = second_derivative(&f);
        for (x, v) in f.grid().nodes().iter().zip(d2.values()).skip(1).take(99) {
            let err = (v - (-PI * PI * (PI * x).sin())).abs();
            assert!(err <= 1e-2, "at x={x}: {err}");
        }
    }

    #[test]
    fn trapezoid_exact_on_linear() {
        for m in [5, 17, 101] {
            let f = SampledFunction::from_fn(unit_grid(m), |x| x);
            assert!((integrate(&f) - 0.5).abs() <= 1e-12);
        }
    }

    #[test]
    fn trapezoid_quadratic_known_error() {
        let f = SampledFunction::from_fn(unit_grid(101), |x| x * x);
        // 1/3 plus the trapezoid correction h^2/12 * (f'(1) - f'(0)) = 1/3 + h^2/6
        assert!((integrate(&f) - 0.33335).abs() <= 1e-6);
    }

    #[test]
    fn trapezoid_normalized_sine_squared() {
        use std::f64::consts::PI;
        let f = SampledFunction::from_fn(unit_grid(101), |x| 2.0 * (PI * x).sin().powi(2));
        assert!((integrate(&f) - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn simpson_beats_trapezoid_on_quartic() {
        let f = SampledFunction::from_fn(unit_grid(101), |x| x.powi(4));
        let exact = 0.2;
        assert!((integrate_with(&f, Quadrature::Simpson) - exact).abs() <= 1e-9);
        assert!((integrate(&f) - exact).abs() > 1e-9);
    }

    #[test]
    fn simpson_odd_panel_count() {
        // 6 nodes -> 5 panels, exercises the 3/8 tail
        let g = make_grid(0.0, 1.0, 6).unwrap();
        let f = SampledFunction::from_fn(g, |x| x * x);
        assert!((integrate_with(&f, Quadrature::Simpson) - 1.0 / 3.0).abs() <= 1e-12);
    }

    #[test]
    fn operators_are_linear() {
        let g = unit_grid(41);
        let f1 = SampledFunction::from_fn(g.clone(), |x| (3.0 * x).sin());
        let f2 = SampledFunction::from_fn(g.clone(), |x| x.exp());
        let (a, b) = (1.7, -0.6);
        let combo = SampledFunction::new(
            g,
            f1.values()
                .iter()
                .zip(f2.values())
                .map(|(u, v)| a * u + b * v)
                .collect(),
        )
        .unwrap();
        for (op, name) in [
            (derivative as fn(&SampledFunction) -> SampledFunction, "d"),
            (second_derivative, "d2"),
        ] {
            let lhs = op(&combo);
            let (r1, r2) = (op(&f1), op(&f2));
            for i in 0..lhs.values().len() {
                let rhs = a * r1.values()[i] + b * r2.values()[i];
                let scale = rhs.abs().max(1.0);
                assert!(
                    (lhs.values()[i] - rhs).abs() <= 1e-12 * scale,
                    "{name} not linear at {i}"
                );
            }
        }
        let lhs = integrate(&combo);
        let rhs = a * integrate(&f1) + b * integrate(&f2);
        assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
    }

    #[test]
    fn derivative_error_halves_at_second_order() {
        use std::f64::consts::PI;
        let err_at = |m: usize| {
            let f = SampledFunction::from_fn(unit_grid(m), |x| (PI * x).sin());
            let d = derivative(&f);
            f.grid()
                .nodes()
                .iter()
                .zip(d.values())
                .map(|(x, dv)| (dv - PI * (PI * x).cos()).abs())
                .fold(0.0f64, f64::max)
        };
        let ratio = err_at(101) / err_at(201);
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn integral_of_nonnegative_is_nonnegative() {
        let f = SampledFunction::from_fn(unit_grid(31), |x| (x - 0.3).powi(2));
        assert!(integrate(&f) >= 0.0);
    }
}
