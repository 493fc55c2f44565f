//! Reconstruction of `q^2` from `psi(t) = E[ln u(x*, t)] - ln v(x*, t)`,
//! using `q^2 = -2 psi'` with a regularized derivative.

use crate::config::RunConfig;
use crate::diff::{forward_transform, FilterSpec};
use crate::error::{Error, Result};
use crate::pipeline::{build_psi, periodize, ExtendedSeries};
use crate::potential::Potential;
use crate::series::{relative_l2_error, trapezoid_integral, DataSeries};
use crate::spde::{run_ensemble, EnsembleSummary, Sampler};

/// Fraction of `[0, T]` trimmed from each end for the primary error metric.
pub const TRIM_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub q_squared: DataSeries,
    /// `sqrt(max(q^2, 0))`.
    pub q_nonneg: DataSeries,
    pub filter: FilterSpec,
    /// Relative l2 error of `q^2` on `[0.1 T, 0.9 T]`.
    pub rel_l2_error_trimmed: Option<f64>,
    /// Relative l2 error of `q^2` on `[0, T]`.
    pub rel_l2_error_full: Option<f64>,
    /// `int max(-q^2, 0) dt`.
    pub negative_mass: f64,
}

/// `-2` times the filtered derivative of the periodized data, restricted to
/// the inner interval. Errors against `truth` are filled in when given.
pub fn reconstruct(
    extended: &ExtendedSeries,
    filter: &FilterSpec,
    truth: Option<&Potential>,
) -> Result<ReconstructionResult> {
    filter.validate()?;
    let spectrum = forward_transform(&extended.extended)?;
    let derivative = filter.differentiate(&spectrum)?;
    let inner = &extended.inner;
    let offset = extended.inner_offset();
    let values: Vec<f64> = derivative.values()[offset..offset + inner.len()]
        .iter()
        .map(|d| -2.0 * d)
        .collect();
    let q_squared = DataSeries::new(inner.t0(), inner.dt(), values)?;
    let q_nonneg = q_squared.map(|_, v| v.max(0.0).sqrt());
    let negative_mass = if q_squared.len() >= 2 {
        trapezoid_integral(&q_squared.map(|_, v| (-v).max(0.0)))?
    } else {
        0.0
    };

    let (rel_l2_error_trimmed, rel_l2_error_full) = match truth {
        Some(q) => {
            let exact = q_squared.map(|t, _| q.eval_squared(t));
            let (full, trimmed) = error_pair(&q_squared, &exact)?;
            (Some(trimmed), Some(full))
        }
        None => (None, None),
    };

    Ok(ReconstructionResult {
        q_squared,
        q_nonneg,
        filter: *filter,
        rel_l2_error_trimmed,
        rel_l2_error_full,
        negative_mass,
    })
}

/// `(full, trimmed)` relative l2 errors.
pub fn error_pair(approx: &DataSeries, exact: &DataSeries) -> Result<(f64, f64)> {
    let full = relative_l2_error(approx, exact)?;
    let span = exact.t_end() - exact.t0();
    let lo = exact.t0() + TRIM_FRACTION * span;
    let hi = exact.t_end() - TRIM_FRACTION * span;
    let trimmed = relative_l2_error(&approx.restrict(lo, hi)?, &exact.restrict(lo, hi)?)?;
    Ok((full, trimmed))
}

/// Every intermediate product of one reconstruction run.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutcome {
    pub ensemble: EnsembleSummary,
    pub psi: DataSeries,
    pub extended: ExtendedSeries,
    pub result: ReconstructionResult,
}

/// Ensemble, `psi`, periodization and reconstruction for `config`, scored
/// against the configured potential.
pub fn reconstruct_potential(config: &RunConfig, sampler: Sampler) -> Result<PipelineOutcome> {
    let ensemble = run_ensemble(config, sampler)?;
    let psi = build_psi(&ensemble.mean_log_u, &ensemble.v_observed)?;
    let extended = periodize(&psi)?;
    let result = reconstruct(&extended, &config.filter, Some(&config.potential))?;
    Ok(PipelineOutcome {
        ensemble,
        psi,
        extended,
        result,
    })
}

/// Noise-free `psi` from the exact sampler.
pub fn exact_psi(config: &RunConfig, q: &Potential) -> Result<DataSeries> {
    let mut c = config.clone();
    c.potential = q.clone();
    c.epsilon = 0.0;
    let ens = run_ensemble(&c, Sampler::ExactExponential)?;
    build_psi(&ens.mean_log_u, &ens.v_observed)
}

/// L2(0, T) distance between the noise-free data series generated by two
/// potentials with the same grid, observation point, path count and seeds.
pub fn uniqueness_probe(q1: &Potential, q2: &Potential, config: &RunConfig) -> Result<f64> {
    config.validate()?;
    let psi1 = exact_psi(config, q1)?;
    let psi2 = exact_psi(config, q2)?;
    if !psi1.same_sampling(&psi2) {
        return Err(Error::invalid(
            "data series for the two potentials are sampled differently",
        ));
    }
    let sq = psi1.map_with(&psi2, |a, b| (a - b) * (a - b));
    Ok(trapezoid_integral(&sq)?.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_data_gives_zero() {
        let psi = DataSeries::from_fn(0.0, 1.0 / 64.0, 65, |_| 0.0).unwrap();
        let ext = periodize(&psi).unwrap();
        for f in [
            FilterSpec::Tikhonov { mu: 0.03 },
            FilterSpec::Cutoff { xi_max: 30.0 },
        ] {
            let r = reconstruct(&ext, &f, None).unwrap();
            assert!(r.q_squared.values().iter().all(|v| v.abs() < 1e-15));
            assert!(r.q_nonneg.values().iter().all(|v| *v < 1e-7));
            assert!(r.rel_l2_error_trimmed.is_none());
            assert_eq!(r.negative_mass, 0.0);
        }
    }

    #[test]
    fn linear_data_recovers_constant() {
        let n = 128;
        let psi = DataSeries::from_fn(0.0, 1.0 / n as f64, n + 1, |t| -t / 2.0).unwrap();
        let ext = periodize(&psi).unwrap();
        let r = reconstruct(
            &ext,
            &FilterSpec::Tikhonov { mu: 0.01 },
            Some(&Potential::Constant(1.0)),
        )
        .unwrap();
        let e = r.rel_l2_error_trimmed.unwrap();
        assert!(e <= 0.05, "trimmed error {e}");
        assert!(r.rel_l2_error_full.is_some());
    }

    #[test]
    fn clamp_consistency() {
        let n = 64;
        let psi =
            DataSeries::from_fn(0.0, 1.0 / n as f64, n + 1, |t| 0.3 * (7.0 * t).sin()).unwrap();
        let ext = periodize(&psi).unwrap();
        let r = reconstruct(&ext, &FilterSpec::Cutoff { xi_max: 40.0 }, None).unwrap();
        assert!(r.q_squared.values().iter().any(|v| *v < 0.0));
        assert!(r.negative_mass > 0.0);
        for (q, q2) in r.q_nonneg.values().iter().zip(r.q_squared.values()) {
            assert!(*q >= 0.0);
            assert!(q * q <= q2.max(0.0) + 1e-12);
        }
    }
}
