//! Stochastic diffusion with multiplicative time-dependent noise,
//! `du = Lap u dt + q(t) u dB(t)`.
//!
//! The finite-difference scheme is backward Euler for the Laplacian with
//! the noise term evaluated at the left endpoint:
//!
//! ```text
//! (I - tau Lap_h) U^{n+1} = U^n (1 + q(t_n) sqrt(tau) eta_{n+1})
//! ```
//!
//! Because the noise factor is constant in space, `U^n = V^n * zeta^n`
//! exactly, with `V` the heat solution and `zeta^n` the running product of
//! the factors. The continuous solution factors the same way through the
//! exponential martingale `Z(t) = exp(int q dB - 1/2 int q^2 ds)`.

use ndarray::{Array2, ArrayView1};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::heat::{
    check_initial, sample_initial, solve_heat_fd, spectral_reference, weighted_norm,
    EigenExpansion, FieldTrajectory, ImplicitStepper, DEFAULT_ORDER,
};
use crate::pipeline::log_noise_factors;
use crate::potential::{InitialCondition, Potential};
use crate::rates::LevelError;
use crate::rng::{noise_stream, rng_stream, NormalStream};
use crate::series::DataSeries;

/// Standard normal variates `eta_1..eta_N`; the Brownian increment over
/// `[t_{n}, t_{n+1}]` is `sqrt(tau) eta_{n+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianIncrements {
    tau: f64,
    etas: Vec<f64>,
}

impl BrownianIncrements {
    pub fn new(tau: f64, etas: Vec<f64>) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::invalid(format!(
                "time step must be positive, got {tau}"
            )));
        }
        if etas.iter().any(|e| !e.is_finite()) {
            return Err(Error::invalid("Brownian variates must be finite"));
        }
        Ok(Self { tau, etas })
    }

    pub fn draw(stream: &mut NormalStream, steps: usize, tau: f64) -> Result<Self> {
        Self::new(tau, stream.take_vec(steps))
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn etas(&self) -> &[f64] {
        &self.etas
    }

    pub fn len(&self) -> usize {
        self.etas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.etas.is_empty()
    }

    /// `B(t_{j+1}) - B(t_j)`.
    pub fn increment(&self, j: usize) -> f64 {
        self.tau.sqrt() * self.etas[j]
    }

    /// Same Brownian path on a grid `factor` times coarser: each coarse
    /// increment is the sum of `factor` fine ones.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !self.len().is_multiple_of(factor) {
            return Err(Error::invalid(format!(
                "cannot coarsen {} increments by a factor of {factor}",
                self.len()
            )));
        }
        let scale = 1.0 / (factor as f64).sqrt();
        let etas = self
            .etas
            .chunks(factor)
            .map(|c| c.iter().sum::<f64>() * scale)
            .collect();
        Self::new(self.tau * factor as f64, etas)
    }
}

/// Running products `zeta^n = prod_{j<n} (1 + q(t_j) sqrt(tau) eta_{j+1})`,
/// `zeta^0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseFactorPath {
    factors: Vec<f64>,
}

impl NoiseFactorPath {
    pub fn factors(&self) -> &[f64] {
        &self.factors
    }
}

/// `ln Z^n = sum_{j<n} q(t_j) sqrt(tau) eta_{j+1} - 1/2 sum_{j<n} q(t_j)^2 tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactFactorPath {
    log_factors: Vec<f64>,
}

impl ExactFactorPath {
    pub fn log_factors(&self) -> &[f64] {
        &self.log_factors
    }

    pub fn factor(&self, n: usize) -> f64 {
        self.log_factors[n].exp()
    }

    pub fn factors(&self) -> Vec<f64> {
        self.log_factors.iter().map(|l| l.exp()).collect()
    }
}

/// Per-step multipliers `1 + q(t_n) sqrt(tau) eta_{n+1}` of the scheme.
fn step_factors<'a>(
    q: &'a Potential,
    path: &'a BrownianIncrements,
) -> impl Iterator<Item = f64> + 'a {
    let tau = path.tau();
    (0..path.len()).map(move |j| 1.0 + q.eval(j as f64 * tau) * path.increment(j))
}

/// The discrete noise factor of the scheme together with the exact
/// exponential sampler driven by the same increments.
pub fn sample_exact_factor(
    q: &Potential,
    path: &BrownianIncrements,
) -> (NoiseFactorPath, ExactFactorPath) {
    let tau = path.tau();
    let mut factors = Vec::with_capacity(path.len() + 1);
    let mut log_factors = Vec::with_capacity(path.len() + 1);
    let (mut zeta, mut log_z) = (1.0, 0.0);
    factors.push(zeta);
    log_factors.push(log_z);
    for (j, f) in step_factors(q, path).enumerate() {
        let qj = q.eval(j as f64 * tau);
        zeta *= f;
        log_z += qj * path.increment(j) - 0.5 * qj * qj * tau;
        factors.push(zeta);
        log_factors.push(log_z);
    }
    (NoiseFactorPath { factors }, ExactFactorPath { log_factors })
}

fn check_path(grid: &Grid1D, path: &BrownianIncrements) -> Result<()> {
    if path.len() != grid.n() {
        return Err(Error::invalid(format!(
            "path has {} increments, grid has {} steps",
            path.len(),
            grid.n()
        )));
    }
    if (path.tau() - grid.tau()).abs() > 1e-12 * grid.tau() {
        return Err(Error::invalid("path time step does not match the grid"));
    }
    Ok(())
}

/// Implicit Euler-Maruyama / central-difference realization.
pub fn solve_spde_fd(
    grid: &Grid1D,
    u0: &[f64],
    q: &Potential,
    path: &BrownianIncrements,
) -> Result<FieldTrajectory> {
    check_initial(grid, u0)?;
    check_path(grid, path)?;
    let stepper = ImplicitStepper::new(grid);
    let mut values = Array2::zeros((grid.num_times(), grid.num_nodes()));
    let mut state = u0.to_vec();
    values.row_mut(0).assign(&ArrayView1::from(&state[..]));
    for (n, factor) in step_factors(q, path).enumerate() {
        stepper.step(&mut state, factor);
        values.row_mut(n + 1).assign(&ArrayView1::from(&state[..]));
    }
    Ok(FieldTrajectory::from_parts(*grid, values))
}

/// Which sampler generates the realizations of an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sampler {
    /// The finite-difference scheme; paths that go non-positive at the
    /// observation point are discarded.
    Fd,
    /// Heat solution times the exact exponential factor; always positive.
    ExactExponential,
}

/// Observation-point statistics of a Monte Carlo ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSummary {
    pub paths: usize,
    pub base_seed: u64,
    pub sampler: Sampler,
    /// Mean of `ln u^{n, eps}` over retained samples.
    pub mean_log_u: DataSeries,
    /// Unbiased sample variance of `ln u^{n, eps}`.
    pub var_log_u: DataSeries,
    /// Mean of the noise-free `u^n` over retained paths.
    pub mean_u: DataSeries,
    /// Deterministic heat solution at the observation point.
    pub v_observed: DataSeries,
    /// Samples entering the log mean at each time level.
    pub retained: Vec<usize>,
    /// Indices of paths rejected by the sampler. Path `p` always uses the
    /// streams keyed by `(base_seed, p)`.
    pub discarded_paths: Vec<u64>,
    /// Noisy samples with `1 + eps zeta <= 0`, left out of the log mean.
    pub flagged_samples: usize,
}

impl EnsembleSummary {
    pub fn discarded_count(&self) -> usize {
        self.discarded_paths.len()
    }
}

const CHUNK: usize = 2048;

enum PathOutcome {
    Discarded,
    Kept {
        clean: Vec<f64>,
        /// `ln u^{n, eps}`, NaN where the sample is flagged.
        log_noisy: Vec<f64>,
    },
}

struct EnsembleJob<'a> {
    config: &'a RunConfig,
    sampler: Sampler,
    stepper: ImplicitStepper,
    u0: Vec<f64>,
    v_obs: Vec<f64>,
    obs_col: usize,
}

impl EnsembleJob<'_> {
    fn simulate(&self, p: u64) -> PathOutcome {
        let grid = &self.config.grid;
        let q = &self.config.potential;
        let mut stream = rng_stream(self.config.base_seed, p);
        let path = BrownianIncrements::new(grid.tau(), stream.take_vec(grid.n()))
            .expect("normal variates are finite");
        let (clean, log_clean) = match self.sampler {
            Sampler::Fd => {
                let mut state = self.u0.clone();
                let mut clean = Vec::with_capacity(grid.num_times());
                clean.push(state[self.obs_col]);
                for factor in step_factors(q, &path) {
                    self.stepper.step(&mut state, factor);
                    clean.push(state[self.obs_col]);
                }
                if clean.iter().any(|&u| !(u > 0.0)) {
                    return PathOutcome::Discarded;
                }
                let logs = clean.iter().map(|u| u.ln()).collect();
                (clean, logs)
            }
            Sampler::ExactExponential => {
                let (_, exact) = sample_exact_factor(q, &path);
                let logs: Vec<f64> = self
                    .v_obs
                    .iter()
                    .zip(exact.log_factors())
                    .map(|(v, l)| v.ln() + l)
                    .collect();
                let clean = self
                    .v_obs
                    .iter()
                    .zip(exact.log_factors())
                    .map(|(v, l)| v * l.exp())
                    .collect();
                (clean, logs)
            }
        };
        let mut log_noisy = log_clean;
        if self.config.epsilon > 0.0 {
            let mut zeta = noise_stream(self.config.base_seed, p);
            for (l, noise) in log_noisy
                .iter_mut()
                .zip(log_noise_factors(self.config.epsilon, &mut zeta))
            {
                *l = noise.map_or(f64::NAN, |ln_f| *l + ln_f);
            }
        }
        PathOutcome::Kept { clean, log_noisy }
    }
}

/// Simulates `config.paths` realizations and reduces the observation-point
/// statistics in ascending path order.
///
/// Paths run on the ambient rayon pool in fixed chunks; the reduction is
/// serial, so the summary is bitwise identical for any thread count.
pub fn run_ensemble(config: &RunConfig, sampler: Sampler) -> Result<EnsembleSummary> {
    config.validate()?;
    let grid = &config.grid;
    let u0 = sample_initial(grid, &config.initial_condition);
    let obs_col = grid
        .column(config.observation_index)
        .expect("validated interior index");
    let heat = solve_heat_fd(grid, &u0)?;
    let v_obs = heat.values().column(obs_col).to_vec();
    if sampler == Sampler::ExactExponential && v_obs.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::invalid(
            "heat solution is not positive at the observation point; ln v is undefined",
        ));
    }
    let job = EnsembleJob {
        config,
        sampler,
        stepper: ImplicitStepper::new(grid),
        u0,
        v_obs,
        obs_col,
    };

    let len = grid.num_times();
    let mut sum_log = vec![0.0; len];
    let mut sum_log2 = vec![0.0; len];
    let mut sum_u = vec![0.0; len];
    let mut retained = vec![0usize; len];
    let mut kept_paths = 0usize;
    let mut discarded_paths = Vec::new();
    let mut flagged_samples = 0usize;

    let total = config.paths as u64;
    let mut start = 0u64;
    while start < total {
        let end = (start + CHUNK as u64).min(total);
        let outcomes: Vec<PathOutcome> = (start..end)
            .into_par_iter()
            .map(|p| job.simulate(p))
            .collect();
        for (p, outcome) in (start..end).zip(outcomes) {
            match outcome {
                PathOutcome::Discarded => discarded_paths.push(p),
                PathOutcome::Kept { clean, log_noisy } => {
                    kept_paths += 1;
                    for n in 0..len {
                        sum_u[n] += clean[n];
                        let l = log_noisy[n];
                        if l.is_nan() {
                            flagged_samples += 1;
                        } else {
                            sum_log[n] += l;
                            sum_log2[n] += l * l;
                            retained[n] += 1;
                        }
                    }
                }
            }
        }
        start = end;
    }

    if kept_paths == 0 {
        return Err(Error::DegenerateEnsemble {
            discarded: discarded_paths.len(),
            total: config.paths,
        });
    }
    if let Some(n) = retained.iter().position(|&c| c == 0) {
        return Err(Error::invalid(format!(
            "every noisy sample at time level {n} is non-positive; increase P or lower epsilon"
        )));
    }

    let tau = grid.tau();
    let mean_log: Vec<f64> = sum_log
        .iter()
        .zip(&retained)
        .map(|(s, &c)| s / c as f64)
        .collect();
    let var_log: Vec<f64> = (0..len)
        .map(|n| {
            let c = retained[n] as f64;
            if retained[n] < 2 {
                0.0
            } else {
                ((sum_log2[n] - sum_log[n] * sum_log[n] / c) / (c - 1.0)).max(0.0)
            }
        })
        .collect();
    let mean_u: Vec<f64> = sum_u.iter().map(|s| s / kept_paths as f64).collect();

    Ok(EnsembleSummary {
        paths: config.paths,
        base_seed: config.base_seed,
        sampler,
        mean_log_u: DataSeries::new(0.0, tau, mean_log)?,
        var_log_u: DataSeries::new(0.0, tau, var_log)?,
        mean_u: DataSeries::new(0.0, tau, mean_u)?,
        v_observed: DataSeries::new(0.0, tau, job.v_obs.clone())?,
        retained,
        discarded_paths,
        flagged_samples,
    })
}

/// Fine steps per finest-level step used for the reference Brownian path.
pub const REFERENCE_REFINEMENT: usize = 8;

/// Root-mean-square weighted-l2 error at the final time of the FD scheme,
/// for `base` and `halvings` successive halvings of its time step.
///
/// All levels share one Brownian path per realization, drawn at
/// `REFERENCE_REFINEMENT` times the finest resolution and summed down. The
/// reference solution is the eigen-series heat solution times the exact
/// exponential factor on the reference path.
pub fn strong_convergence_probe(
    q: &Potential,
    u0: &InitialCondition,
    base: &Grid1D,
    halvings: usize,
    paths: usize,
    base_seed: u64,
) -> Result<Vec<LevelError>> {
    if halvings < 1 {
        return Err(Error::invalid(
            "strong convergence probe needs at least one halving",
        ));
    }
    if paths < 1 {
        return Err(Error::invalid(
            "strong convergence probe needs at least one path",
        ));
    }
    let levels: Vec<Grid1D> = (0..=halvings)
        .map(|k| base.with_steps(base.n() << k))
        .collect::<Result<_>>()?;
    let finest = levels[halvings];
    let ref_steps = finest.n() * REFERENCE_REFINEMENT;
    let ref_tau = base.t_final() / ref_steps as f64;

    let oracle = EigenExpansion::from_initial(base.a(), DEFAULT_ORDER, u0)?;
    let v_exact: Vec<f64> = base
        .nodes()
        .into_iter()
        .map(|x| spectral_reference(&oracle, x, base.t_final()))
        .collect::<Result<_>>()?;
    let u0_samples = sample_initial(base, u0);

    let per_path: Vec<Result<Vec<f64>>> = (0..paths as u64)
        .into_par_iter()
        .map(|p| {
            let fine = BrownianIncrements::draw(&mut rng_stream(base_seed, p), ref_steps, ref_tau)?;
            let (_, exact) = sample_exact_factor(q, &fine);
            let z = exact.factor(ref_steps);
            levels
                .iter()
                .map(|grid| {
                    let path = fine.coarsen(ref_steps / grid.n())?;
                    let traj = solve_spde_fd(grid, &u0_samples, q, &path)?;
                    let last = traj.row(grid.n());
                    let err = last.iter().zip(&v_exact).map(|(u, v)| v * z - u);
                    Ok(weighted_norm(grid.h(), err).powi(2))
                })
                .collect()
        })
        .collect();

    let mut mean_sq = vec![0.0; levels.len()];
    for sq in per_path {
        for (acc, e) in mean_sq.iter_mut().zip(sq?) {
            *acc += e;
        }
    }
    Ok(levels
        .iter()
        .zip(mean_sq)
        .map(|(g, s)| LevelError {
            m: g.m(),
            n: g.n(),
            h: g.h(),
            tau: g.tau(),
            error: (s / paths as f64).sqrt(),
        })
        .collect())
}
