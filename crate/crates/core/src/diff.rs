//! Regularized differentiation of periodic samples through the discrete
//! Fourier transform.
//!
//! Normalization: for `L` samples on a period `P = L dt`,
//! `c_j = (1/L) sum_k x_k exp(-2 pi i j k / L)`, so that
//! `x_k = sum_j c_j exp(i xi_j (t_k - t_0))` with `xi_j = 2 pi j / P`, and
//! Parseval reads `dt sum |x_k|^2 = P sum |c_j|^2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::series::DataSeries;

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    t0: f64,
    dt: f64,
    /// Coefficients in FFT storage order: index `k` holds mode
    /// `j = k` for `k < (L + 1) / 2` and `j = k - L` otherwise.
    modes: Vec<Complex64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn period(&self) -> f64 {
        self.dt * self.modes.len() as f64
    }

    pub fn modes(&self) -> &[Complex64] {
        &self.modes
    }

    /// Signed mode number stored at index `k`.
    pub fn mode_number(&self, k: usize) -> i64 {
        let l = self.len();
        if k < l.div_ceil(2) {
            k as i64
        } else {
            k as i64 - l as i64
        }
    }

    /// Angular frequency `xi_j = 2 pi j / P` of the mode stored at `k`.
    pub fn frequency(&self, k: usize) -> f64 {
        2.0 * PI * self.mode_number(k) as f64 / self.period()
    }

    /// Coefficient of signed mode `j`, if represented.
    pub fn mode(&self, j: i64) -> Option<Complex64> {
        let l = self.len() as i64;
        let lo = -(l / 2);
        let hi = (l + 1) / 2 - 1;
        (lo..=hi)
            .contains(&j)
            .then(|| self.modes[j.rem_euclid(l) as usize])
    }

    /// Highest representable angular frequency, `pi / dt`.
    pub fn nyquist(&self) -> f64 {
        PI / self.dt
    }

    /// Inverse transform, full complex samples.
    pub fn inverse_complex(&self) -> Vec<Complex64> {
        let mut buf = self.modes.clone();
        FftPlanner::<f64>::new()
            .plan_fft_inverse(buf.len())
            .process(&mut buf);
        buf
    }

    /// Inverse transform, real part.
    pub fn inverse(&self) -> DataSeries {
        let values = self.inverse_complex().iter().map(|c| c.re).collect();
        DataSeries::new(self.t0, self.dt, values).expect("spectrum sampling is valid")
    }

    /// Every mode multiplied by `symbol(xi_j)`. The unpaired Nyquist mode of
    /// an even-length spectrum is zeroed.
    pub fn filter(&self, symbol: impl Fn(f64) -> Complex64) -> Spectrum {
        let l = self.len();
        let modes = self
            .modes
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if l.is_multiple_of(2) && k == l / 2 {
                    Complex64::new(0.0, 0.0)
                } else {
                    c * symbol(self.frequency(k))
                }
            })
            .collect();
        Spectrum {
            t0: self.t0,
            dt: self.dt,
            modes,
        }
    }

    /// `filter` followed by the real inverse transform.
    pub fn apply_symbol(&self, symbol: impl Fn(f64) -> Complex64) -> DataSeries {
        self.filter(symbol).inverse()
    }
}

/// DFT of a uniformly sampled series treated as one period.
pub fn forward_transform(samples: &DataSeries) -> Result<Spectrum> {
    if samples.len() < 4 {
        return Err(Error::invalid(
            "Fourier differentiation needs at least 4 samples",
        ));
    }
    let mut buf: Vec<Complex64> = samples
        .values()
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .collect();
    FftPlanner::<f64>::new()
        .plan_fft_forward(buf.len())
        .process(&mut buf);
    let scale = 1.0 / buf.len() as f64;
    for c in &mut buf {
        *c *= scale;
    }
    Ok(Spectrum {
        t0: samples.t0(),
        dt: samples.dt(),
        modes: buf,
    })
}

/// Unregularized spectral derivative, symbol `i xi`.
pub fn spectral_derivative(spectrum: &Spectrum) -> DataSeries {
    spectrum.apply_symbol(|xi| Complex64::new(0.0, xi))
}

/// Tikhonov-filtered derivative, symbol `i xi / (1 + (mu xi)^2)`.
/// `mu = 0` gives the unregularized derivative.
pub fn tikhonov_derivative(spectrum: &Spectrum, mu: f64) -> Result<DataSeries> {
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(Error::invalid(format!(
            "Tikhonov parameter must be >= 0, got {mu}"
        )));
    }
    Ok(spectrum.apply_symbol(|xi| tikhonov_symbol(mu, xi)))
}

pub fn tikhonov_symbol(mu: f64, xi: f64) -> Complex64 {
    Complex64::new(0.0, xi / (1.0 + (mu * xi).powi(2)))
}

pub fn cutoff_symbol(xi_max: f64, xi: f64) -> Complex64 {
    // closed cut; the tolerance keeps modes computed as exactly xi_max
    if xi.abs() <= xi_max * (1.0 + 1e-12) {
        Complex64::new(0.0, xi)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// Spectral cut-off derivative, symbol `i xi 1{|xi| <= xi_max}`.
pub fn cutoff_derivative(spectrum: &Spectrum, xi_max: f64) -> Result<DataSeries> {
    if !(xi_max > 0.0) {
        return Err(Error::invalid(format!(
            "cut-off frequency must be positive, got {xi_max}"
        )));
    }
    Ok(spectrum.apply_symbol(|xi| cutoff_symbol(xi_max, xi)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterSpec {
    Tikhonov { mu: f64 },
    Cutoff { xi_max: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FilterKind {
    Tikhonov,
    Cutoff,
}

impl FilterSpec {
    pub fn kind(&self) -> FilterKind {
        match self {
            FilterSpec::Tikhonov { .. } => FilterKind::Tikhonov,
            FilterSpec::Cutoff { .. } => FilterKind::Cutoff,
        }
    }

    pub fn parameter(&self) -> f64 {
        match *self {
            FilterSpec::Tikhonov { mu } => mu,
            FilterSpec::Cutoff { xi_max } => xi_max,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            FilterSpec::Tikhonov { mu } if !(mu.is_finite() && mu > 0.0) => Err(Error::invalid(
                format!("mu must be > 0 for the Tikhonov filter, got {mu}"),
            )),
            FilterSpec::Cutoff { xi_max } if !(xi_max.is_finite() && xi_max > 0.0) => {
                Err(Error::invalid(format!(
                    "xi_max must be > 0 for the cut-off filter, got {xi_max}"
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn differentiate(&self, spectrum: &Spectrum) -> Result<DataSeries> {
        match *self {
            FilterSpec::Tikhonov { mu } => tikhonov_derivative(spectrum, mu),
            FilterSpec::Cutoff { xi_max } => cutoff_derivative(spectrum, xi_max),
        }
    }
}

/// Factor multiplying `||phi||_{H^p}` in the L2 error bound of each filter:
/// `max(mu^{p-1}, mu^{-1})` for Tikhonov, `xi_max^{-(p-1)}` for cut-off.
pub fn filter_error_bound(kind: FilterKind, p: f64, parameter: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::invalid(format!(
            "smoothness order p must exceed 1, got {p}"
        )));
    }
    if !(parameter > 0.0) {
        return Err(Error::invalid(format!(
            "regularization parameter must be positive, got {parameter}"
        )));
    }
    Ok(match kind {
        FilterKind::Tikhonov => parameter.powf(p - 1.0).max(1.0 / parameter),
        FilterKind::Cutoff => parameter.powf(-(p - 1.0)),
    })
}

/// `mu^2 |xi|^3 / (1 + (mu xi)^2) (1 + xi^2)^{-p/2}`, the Tikhonov error
/// symbol whose supremum the bound controls.
pub fn tikhonov_error_symbol(mu: f64, p: f64, xi: f64) -> f64 {
    let a = xi.abs();
    mu * mu * a * a * a / (1.0 + (mu * xi).powi(2)) * (1.0 + xi * xi).powf(-p / 2.0)
}
