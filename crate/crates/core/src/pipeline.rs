//! Observation data: measurement noise, the log-ratio series `psi`, its
//! linear interpolant, and the periodic extension used for FFT
//! differentiation.

use crate::error::{Error, Result};
use crate::rng::NormalStream;
use crate::series::DataSeries;
use crate::spline::NaturalCubicSpline;

/// `ln(1 + eps zeta_n)` for successive variates of `stream`, `None` where
/// the factor is non-positive.
pub(crate) fn log_noise_factors(
    epsilon: f64,
    stream: &mut NormalStream,
) -> impl Iterator<Item = Option<f64>> + '_ {
    stream.map(move |zeta| {
        let f = 1.0 + epsilon * zeta;
        (f > 0.0).then(|| f.ln())
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoisyObservation {
    pub clean: DataSeries,
    pub epsilon: f64,
    /// `u^n (1 + eps zeta_n)`.
    pub noisy: DataSeries,
    /// Indices with `1 + eps zeta_n <= 0`.
    pub flagged: Vec<usize>,
}

impl NoisyObservation {
    pub fn flag_count(&self) -> usize {
        self.flagged.len()
    }
}

/// Multiplies each sample by `1 + eps zeta_n` with `zeta_n` drawn from
/// `stream`. Samples whose factor is non-positive are flagged, not dropped.
pub fn inject_noise(
    clean: &DataSeries,
    epsilon: f64,
    stream: &mut NormalStream,
) -> Result<NoisyObservation> {
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::invalid(format!(
            "noise level must be >= 0, got {epsilon}"
        )));
    }
    let mut flagged = Vec::new();
    let noisy = if epsilon == 0.0 {
        clean.clone()
    } else {
        let values = clean
            .values()
            .iter()
            .enumerate()
            .map(|(n, u)| {
                let f = 1.0 + epsilon * stream.next_normal();
                if f <= 0.0 {
                    flagged.push(n);
                }
                u * f
            })
            .collect();
        DataSeries::new(clean.t0(), clean.dt(), values)?
    };
    Ok(NoisyObservation {
        clean: clean.clone(),
        epsilon,
        noisy,
        flagged,
    })
}

/// `psi^n = E[ln u^{n, eps}] - ln v^n`.
pub fn build_psi(ensemble_log_mean: &DataSeries, v_observed: &DataSeries) -> Result<DataSeries> {
    if !ensemble_log_mean.same_sampling(v_observed) {
        return Err(Error::invalid(
            "log mean and heat solution are sampled differently",
        ));
    }
    if let Some((n, v)) = v_observed
        .values()
        .iter()
        .enumerate()
        .find(|(_, v)| !(**v > 0.0))
    {
        return Err(Error::invalid(format!(
            "heat solution must be positive at the observation point, got {v} at level {n}"
        )));
    }
    Ok(ensemble_log_mean.map_with(v_observed, |l, v| l - v.ln()))
}

/// Piecewise-linear interpolant of the samples.
pub fn interpolate_psi(psi: &DataSeries, t: f64) -> Result<f64> {
    let (lo, hi) = (psi.t0(), psi.t_end());
    let tol = 1e-12 * psi.dt();
    if !(t >= lo - tol && t <= hi + tol) {
        return Err(Error::OutOfRange { t, lo, hi });
    }
    let v = psi.values();
    if v.len() == 1 {
        return Ok(v[0]);
    }
    let s = ((t - lo) / psi.dt()).clamp(0.0, (v.len() - 1) as f64);
    let n = (s.floor() as usize).min(v.len() - 2);
    let (tn, tn1) = (psi.t(n), psi.t(n + 1));
    Ok(((tn1 - t) * v[n] + (t - tn) * v[n + 1]) / psi.dt())
}

/// Leading/trailing data samples fitted for each extension wing.
pub const WING_DATA_SAMPLES: usize = 16;
/// Zero anchors pinned at the outer end of each wing.
pub const WING_ZERO_ANCHORS: usize = 7;

/// `psi` on `[t0, t0 + T]` extended to one period `[t0 - T, t0 + 2T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedSeries {
    pub inner: DataSeries,
    /// `3N` samples on the half-open period.
    pub extended: DataSeries,
    /// `(t, value)` knots of the left-wing spline.
    pub left_anchors: Vec<(f64, f64)>,
    /// `(t, value)` knots of the right-wing spline.
    pub right_anchors: Vec<(f64, f64)>,
}

impl ExtendedSeries {
    /// Number of temporal subintervals `N` of the inner series.
    pub fn steps(&self) -> usize {
        self.inner.len() - 1
    }

    /// Index of the inner series' first sample in `extended`.
    pub fn inner_offset(&self) -> usize {
        self.steps()
    }

    pub fn period(&self) -> f64 {
        self.extended.dt() * self.extended.len() as f64
    }
}

/// Extends `psi` to a `3T`-periodic series that vanishes at `-T` and `2T`.
///
/// Each wing is a natural cubic spline through the 16 data samples nearest
/// to it and 7 zeros on the last (or first) 7 nodes of the wing.
pub fn periodize(psi: &DataSeries) -> Result<ExtendedSeries> {
    let steps = psi.len().saturating_sub(1);
    if steps < WING_DATA_SAMPLES {
        return Err(Error::invalid(format!(
            "periodization needs N >= {WING_DATA_SAMPLES}, got N = {steps}"
        )));
    }
    let tau = psi.dt();
    let t0 = psi.t0();
    let span = steps as f64 * tau;
    let v = psi.values();
    let node = |k: i64| t0 + k as f64 * tau;
    let n = steps as i64;
    let zeros = WING_ZERO_ANCHORS as i64;
    let data = WING_DATA_SAMPLES as i64;

    let right_anchors: Vec<(f64, f64)> = (n - data + 1..=n)
        .map(|k| (node(k), v[k as usize]))
        .chain((2 * n - zeros + 1..=2 * n).map(|k| (node(k), 0.0)))
        .collect();
    let left_anchors: Vec<(f64, f64)> = (-n..-n + zeros)
        .map(|k| (node(k), 0.0))
        .chain((0..data).map(|k| (node(k), v[k as usize])))
        .collect();
    let fit = |anchors: &[(f64, f64)]| {
        let (xs, ys): (Vec<f64>, Vec<f64>) = anchors.iter().cloned().unzip();
        NaturalCubicSpline::fit(&xs, &ys)
    };
    let right = fit(&right_anchors)?;
    let left = fit(&left_anchors)?;

    let mut values = Vec::with_capacity(3 * steps);
    for k in -n..0 {
        values.push(if k < -n + zeros {
            0.0
        } else {
            left.eval(node(k))
        });
    }
    values.extend_from_slice(v);
    for k in n + 1..2 * n {
        values.push(if k > 2 * n - zeros {
            0.0
        } else {
            right.eval(node(k))
        });
    }
    debug_assert_eq!(values.len(), 3 * steps);

    Ok(ExtendedSeries {
        inner: psi.clone(),
        extended: DataSeries::new(t0 - span, tau, values)?,
        left_anchors,
        right_anchors,
    })
}
