//! Forward simulation of the stochastic diffusion equation
//! `du = Lap u dt + q(t) u dB(t)` on `(-a, a)` with Dirichlet boundary, and
//! reconstruction of `q^2(t)` from the mean log-solution at one interior
//! point.
//!
//! The reconstruction uses `q^2(t) = -2 d/dt E[ln(u(x*, t) / v(x*, t))]`,
//! where `v` solves the heat equation with the same initial data. The
//! derivative is computed by FFT with Tikhonov or spectral cut-off
//! filtering after periodically extending the data.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod diff;
pub mod error;
pub mod grid;
pub mod heat;
pub mod inversion;
pub mod pipeline;
pub mod potential;
pub mod rates;
pub mod rng;
pub mod series;
pub mod spde;
pub mod spline;
pub mod tridiag;

pub use config::RunConfig;
pub use diff::{
    cutoff_derivative, filter_error_bound, forward_transform, spectral_derivative,
    tikhonov_derivative, FilterKind, FilterSpec, Spectrum,
};
pub use error::{Error, Result};
pub use grid::Grid1D;
pub use heat::{
    fd_convergence_probe, solve_heat_fd, spectral_reference, EigenExpansion, FieldTrajectory,
};
pub use inversion::{
    reconstruct, reconstruct_potential, uniqueness_probe, PipelineOutcome, ReconstructionResult,
};
pub use pipeline::{
    build_psi, inject_noise, interpolate_psi, periodize, ExtendedSeries, NoisyObservation,
};
pub use potential::{InitialCondition, Potential};
pub use rates::{fitted_order, LevelError};
pub use rng::{noise_stream, rng_stream, NormalStream};
pub use series::{relative_l2_error, trapezoid_integral, DataSeries};
pub use spde::{
    run_ensemble, sample_exact_factor, solve_spde_fd, strong_convergence_probe, BrownianIncrements,
    EnsembleSummary, ExactFactorPath, NoiseFactorPath, Sampler,
};
