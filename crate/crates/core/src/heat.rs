//! Deterministic heat problem on `(-a, a)` with homogeneous Dirichlet data.
//!
//! The finite-difference solver uses central differences in space and
//! backward Euler in time, so every step solves `(I - tau Lap_h) V^{n+1} = V^n`
//! on the interior nodes. [`EigenExpansion`] is the sine-series oracle used
//! to check it.

use std::f64::consts::PI;

use ndarray::{Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::potential::InitialCondition;
use crate::rates::LevelError;
use crate::series::DataSeries;
use crate::tridiag::ConstTridiagonal;

/// Field values on every grid node at every time level. Row `n` holds
/// `t_n`, column `c` holds node `m = c - M`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldTrajectory {
    grid: Grid1D,
    values: Array2<f64>,
}

impl FieldTrajectory {
    pub(crate) fn from_parts(grid: Grid1D, values: Array2<f64>) -> Self {
        debug_assert_eq!(values.dim(), (grid.num_times(), grid.num_nodes()));
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn row(&self, n: usize) -> ArrayView1<'_, f64> {
        self.values.row(n)
    }

    /// Value at time level `n` and signed node index `m`.
    pub fn at(&self, n: usize, m: i64) -> f64 {
        let col = self.grid.column(m).expect("node index out of range");
        self.values[[n, col]]
    }

    /// Time series at node `m`.
    pub fn at_node(&self, m: i64) -> Result<DataSeries> {
        let col = self
            .grid
            .column(m)
            .ok_or_else(|| Error::invalid(format!("node index {m} outside the grid")))?;
        DataSeries::new(0.0, self.grid.tau(), self.values.column(col).to_vec())
    }
}

/// Samples `u0` on the `2M + 1` spatial nodes.
pub fn sample_initial(grid: &Grid1D, u0: &InitialCondition) -> Vec<f64> {
    grid.nodes().into_iter().map(|x| u0.eval(x)).collect()
}

/// One implicit step operator shared by the deterministic and stochastic
/// schemes.
#[derive(Debug, Clone)]
pub(crate) struct ImplicitStepper {
    system: ConstTridiagonal,
}

impl ImplicitStepper {
    pub(crate) fn new(grid: &Grid1D) -> Self {
        let r = grid.tau() / (grid.h() * grid.h());
        let interior = grid.num_nodes() - 2;
        let system = ConstTridiagonal::new(interior, -r, 1.0 + 2.0 * r, -r)
            .expect("backward Euler matrix is strictly diagonally dominant");
        Self { system }
    }

    /// Advance `state` (all nodes) by one step. The interior right-hand side
    /// is the current interior state multiplied by `factor`.
    pub(crate) fn step(&self, state: &mut [f64], factor: f64) {
        let last = state.len() - 1;
        let interior = &mut state[1..last];
        if factor != 1.0 {
            for v in interior.iter_mut() {
                *v *= factor;
            }
        }
        self.system.solve_in_place(interior);
        state[0] = 0.0;
        state[last] = 0.0;
    }
}

pub(crate) fn check_initial(grid: &Grid1D, u0: &[f64]) -> Result<()> {
    if u0.len() != grid.num_nodes() {
        return Err(Error::invalid(format!(
            "initial condition has {} samples, grid has {} nodes",
            u0.len(),
            grid.num_nodes()
        )));
    }
    if u0.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("initial condition has non-finite samples"));
    }
    Ok(())
}

/// Backward-Euler / central-difference solution of the heat problem.
///
/// Row 0 is `u0` as given; boundary entries of `u0` never enter the scheme
/// since the boundary is pinned to zero from the first step on.
pub fn solve_heat_fd(grid: &Grid1D, u0: &[f64]) -> Result<FieldTrajectory> {
    check_initial(grid, u0)?;
    let stepper = ImplicitStepper::new(grid);
    let mut values = Array2::zeros((grid.num_times(), grid.num_nodes()));
    let mut state = u0.to_vec();
    values.row_mut(0).assign(&ArrayView1::from(&state[..]));
    for n in 1..grid.num_times() {
        stepper.step(&mut state, 1.0);
        values.row_mut(n).assign(&ArrayView1::from(&state[..]));
    }
    Ok(FieldTrajectory::from_parts(*grid, values))
}

/// Default truncation order of the sine-series oracle.
pub const DEFAULT_ORDER: usize = 200;

/// Truncated expansion of `u0` in the Dirichlet eigenfunctions of `(-a, a)`:
/// `phi_k(x) = sin(k pi (x + a) / (2a)) / sqrt(a)`, `lambda_k = (k pi / (2a))^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenExpansion {
    a: f64,
    coefficients: Vec<f64>,
    u0_l2: f64,
}

impl EigenExpansion {
    /// Projects `u0` onto the first `order` modes with the composite
    /// trapezoid rule on `8 order + 1` nodes.
    pub fn from_fn(a: f64, order: usize, u0: impl Fn(f64) -> f64) -> Result<Self> {
        if order < 1 {
            return Err(Error::invalid("expansion order K must be at least 1"));
        }
        if !(a > 0.0) {
            return Err(Error::invalid("half-width a must be positive"));
        }
        let intervals = 8 * order;
        let dx = 2.0 * a / intervals as f64;
        let samples: Vec<f64> = (0..=intervals).map(|i| u0(-a + i as f64 * dx)).collect();
        let weight = |i: usize| {
            if i == 0 || i == intervals {
                0.5 * dx
            } else {
                dx
            }
        };
        let coefficients = (1..=order)
            .map(|k| {
                samples
                    .iter()
                    .enumerate()
                    .map(|(i, &u)| weight(i) * u * eigenfunction(a, k, -a + i as f64 * dx))
                    .sum()
            })
            .collect();
        let u0_l2 = samples
            .iter()
            .enumerate()
            .map(|(i, u)| weight(i) * u * u)
            .sum::<f64>()
            .sqrt();
        Ok(Self {
            a,
            coefficients,
            u0_l2,
        })
    }

    pub fn from_initial(a: f64, order: usize, u0: &InitialCondition) -> Result<Self> {
        Self::from_fn(a, order, |x| u0.eval(x))
    }

    /// Expansion with explicit coefficients `u_{0,1..=K}`.
    pub fn from_coefficients(a: f64, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::invalid("expansion order K must be at least 1"));
        }
        if !(a > 0.0) {
            return Err(Error::invalid("half-width a must be positive"));
        }
        let u0_l2 = coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
        Ok(Self {
            a,
            coefficients,
            u0_l2,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn eigenvalue(&self, k: usize) -> f64 {
        eigenvalue(self.a, k)
    }

    /// Bound on the omitted modes `k > K` at time `t`, using
    /// `|u_{0,k}| <= ||u0||_{L2}` and `|phi_k| <= a^{-1/2}`.
    pub fn tail_bound(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return f64::INFINITY;
        }
        let c = (PI / (2.0 * self.a)).powi(2) * t;
        let k1 = (self.order() + 1) as f64;
        let first = (-c * k1 * k1).exp();
        let ratio = (-c * (2.0 * k1)).exp();
        self.u0_l2 / self.a.sqrt() * first / (1.0 - ratio)
    }

    fn eval_unchecked(&self, x: f64, t: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = i + 1;
                c * (-self.eigenvalue(k) * t).exp() * eigenfunction(self.a, k, x)
            })
            .sum()
    }
}

pub fn eigenvalue(a: f64, k: usize) -> f64 {
    (k as f64 * PI / (2.0 * a)).powi(2)
}

pub fn eigenfunction(a: f64, k: usize, x: f64) -> f64 {
    (k as f64 * PI * (x + a) / (2.0 * a)).sin() / a.sqrt()
}

/// Truncated eigen-series value of the heat solution at `(x, t)`.
pub fn spectral_reference(expansion: &EigenExpansion, x: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::invalid(format!(
            "time must be non-negative, got {t}"
        )));
    }
    let a = expansion.a();
    if !(x >= -a && x <= a) {
        return Err(Error::OutOfRange {
            t: x,
            lo: -a,
            hi: a,
        });
    }
    Ok(expansion.eval_unchecked(x, t))
}

/// `h^{1/2} ||v||_{l2}`.
pub fn weighted_norm(h: f64, v: impl IntoIterator<Item = f64>) -> f64 {
    (h * v.into_iter().map(|x| x * x).sum::<f64>()).sqrt()
}

/// Weighted-l2 error at the final time of the FD solution against the
/// eigen-series oracle, for each `(M, N)` level.
pub fn fd_convergence_probe(
    a: f64,
    t_final: f64,
    u0: &InitialCondition,
    levels: &[(usize, usize)],
) -> Result<Vec<LevelError>> {
    if levels.is_empty() {
        return Err(Error::invalid("convergence probe needs at least one level"));
    }
    let oracle = EigenExpansion::from_initial(a, DEFAULT_ORDER, u0)?;
    levels
        .iter()
        .map(|&(m, n)| {
            let grid = Grid1D::new(a, t_final, m, n)?;
            let traj = solve_heat_fd(&grid, &sample_initial(&grid, u0))?;
            let last = traj.row(grid.n());
            let mut diffs = Vec::with_capacity(grid.num_nodes());
            for (col, &v) in last.iter().enumerate() {
                let exact = spectral_reference(&oracle, grid.x_at_column(col), t_final)?;
                diffs.push(exact - v);
            }
            Ok(LevelError {
                m,
                n,
                h: grid.h(),
                tau: grid.tau(),
                error: weighted_norm(grid.h(), diffs),
            })
        })
        .collect()
}
