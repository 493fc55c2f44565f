//! Uniformly sampled scalar time series and the quadrature/error metrics
//! defined on them.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DataSeries {
    t0: f64,
    dt: f64,
    values: Vec<f64>,
}

impl DataSeries {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("data series must have at least one sample"));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::invalid(format!(
                "sample spacing must be positive, got {dt}"
            )));
        }
        if !t0.is_finite() {
            return Err(Error::invalid("start time must be finite"));
        }
        Ok(Self { t0, dt, values })
    }

    /// Samples `f` at `t0 + k dt` for `k = 0..len`.
    pub fn from_fn(t0: f64, dt: f64, len: usize, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        let values = (0..len).map(|k| f(t0 + k as f64 * dt)).collect();
        Self::new(t0, dt, values)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn t(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.t(self.len() - 1)
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|k| self.t(k))
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().enumerate().map(|(k, &v)| (self.t(k), v))
    }

    /// Same sampling, new values.
    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self {
            t0: self.t0,
            dt: self.dt,
            values: self.iter().map(|(t, v)| f(t, v)).collect(),
        }
    }

    /// Pointwise combination with a series of the same sampling.
    pub fn map_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert!(self.same_sampling(other));
        Self {
            t0: self.t0,
            dt: self.dt,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    /// Builds a series from `(t, value)` pairs, which must be uniformly
    /// spaced to within `1e-9` of a step.
    pub fn from_points(points: &[(f64, f64)]) -> Result<Self> {
        match points {
            [] => Err(Error::invalid("data series must have at least one sample")),
            [(t, v)] => Self::new(*t, 1.0, vec![*v]),
            [(t0, _), (t1, _), ..] => {
                let dt = t1 - t0;
                for (k, (t, _)) in points.iter().enumerate() {
                    if (t - (t0 + k as f64 * dt)).abs() > 1e-9 * dt.abs().max(1e-300) {
                        return Err(Error::invalid(format!(
                            "non-uniform sampling at sample {k} (t = {t})"
                        )));
                    }
                }
                Self::new(*t0, dt, points.iter().map(|p| p.1).collect())
            }
        }
    }

    pub fn same_sampling(&self, other: &Self) -> bool {
        self.len() == other.len()
            && (self.dt - other.dt).abs() <= 1e-12 * self.dt.abs().max(other.dt.abs())
            && (self.t0 - other.t0).abs() <= 1e-12 * self.dt
    }

    /// Samples whose time lies in `[lo, hi]`, with a tolerance of a
    /// millionth of a step on both ends.
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<Self> {
        let tol = 1e-6 * self.dt;
        let first = (0..self.len()).find(|&k| self.t(k) >= lo - tol);
        let last = (0..self.len()).rev().find(|&k| self.t(k) <= hi + tol);
        match (first, last) {
            (Some(i), Some(j)) if i <= j => {
                Self::new(self.t(i), self.dt, self.values[i..=j].to_vec())
            }
            _ => Err(Error::invalid(format!("no samples in [{lo}, {hi}]"))),
        }
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Composite trapezoid rule over the span of the series.
pub fn trapezoid_integral(series: &DataSeries) -> Result<f64> {
    let v = series.values();
    if v.len() < 2 {
        return Err(Error::invalid("trapezoid rule needs at least 2 samples"));
    }
    let inner: f64 = v[1..v.len() - 1].iter().sum();
    Ok(series.dt() * (0.5 * (v[0] + v[v.len() - 1]) + inner))
}

/// `||approx - exact|| / ||exact||` in the discrete l2 norm. Falls back to
/// the absolute norm of the difference when `exact` is identically zero.
pub fn relative_l2_error(approx: &DataSeries, exact: &DataSeries) -> Result<f64> {
    if !approx.same_sampling(exact) {
        return Err(Error::invalid(format!(
            "sampling mismatch: ({}, {}, {}) vs ({}, {}, {})",
            approx.t0(),
            approx.dt(),
            approx.len(),
            exact.t0(),
            exact.dt(),
            exact.len()
        )));
    }
    let diff: f64 = approx
        .values()
        .iter()
        .zip(exact.values())
        .map(|(a, e)| (a - e) * (a - e))
        .sum::<f64>()
        .sqrt();
    let denom = exact.l2_norm();
    Ok(if denom == 0.0 { diff } else { diff / denom })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn trapezoid_exact_on_constants_and_linears() {
        for n in [1usize, 3, 10, 57] {
            let s = DataSeries::from_fn(0.0, 1.0 / n as f64, n + 1, |_| 1.0).unwrap();
            assert_abs_diff_eq!(trapezoid_integral(&s).unwrap(), 1.0, epsilon = 1e-14);
        }
        let s = DataSeries::from_fn(0.0, 0.25, 5, |t| t).unwrap();
        assert_abs_diff_eq!(trapezoid_integral(&s).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn trapezoid_sine() {
        let n = 128;
        let dt = 1.0 / n as f64;
        let s = DataSeries::from_fn(0.0, dt, n + 1, |t| (PI * t).sin()).unwrap();
        let exact = 2.0 / PI;
        let got = trapezoid_integral(&s).unwrap();
        assert!((got - exact).abs() <= PI * PI / 12.0 * dt * dt);
        assert!((got - exact).abs() < 1e-4);
    }

    #[test]
    fn trapezoid_needs_two_samples() {
        let s = DataSeries::new(0.0, 1.0, vec![1.0]).unwrap();
        assert!(matches!(
            trapezoid_integral(&s),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn relative_error_cases() {
        let exact = DataSeries::from_fn(0.0, 0.1, 11, |t| t * t + 1.0).unwrap();
        assert_eq!(relative_l2_error(&exact, &exact).unwrap(), 0.0);
        let doubled = exact.map(|_, v| 2.0 * v);
        assert_abs_diff_eq!(
            relative_l2_error(&doubled, &exact).unwrap(),
            1.0,
            epsilon = 1e-14
        );

        let zero = DataSeries::from_fn(0.0, 0.1, 11, |_| 0.0).unwrap();
        let shifted = zero.map(|_, v| v + 0.5);
        assert_abs_diff_eq!(
            relative_l2_error(&shifted, &zero).unwrap(),
            0.5 * 11f64.sqrt(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn relative_error_rejects_mismatch() {
        let a = DataSeries::from_fn(0.0, 0.1, 11, |t| t).unwrap();
        let b = DataSeries::from_fn(0.0, 0.1, 10, |t| t).unwrap();
        let c = DataSeries::from_fn(0.05, 0.1, 11, |t| t).unwrap();
        assert!(relative_l2_error(&a, &b).is_err());
        assert!(relative_l2_error(&a, &c).is_err());
    }

    #[test]
    fn restrict_selects_closed_window() {
        let s = DataSeries::from_fn(0.0, 0.1, 11, |t| t).unwrap();
        let r = s.restrict(0.1, 0.9).unwrap();
        assert_eq!(r.len(), 9);
        assert_abs_diff_eq!(r.t0(), 0.1, epsilon = 1e-15);
        assert!(s.restrict(2.0, 3.0).is_err());
    }

    #[test]
    fn from_points_checks_uniformity() {
        let s = DataSeries::from_points(&[(0.0, 1.0), (0.5, 2.0), (1.0, 3.0)]).unwrap();
        assert_eq!(s.dt(), 0.5);
        assert_eq!(s.values(), &[1.0, 2.0, 3.0]);
        assert!(DataSeries::from_points(&[(0.0, 1.0), (0.5, 2.0), (1.2, 3.0)]).is_err());
        assert!(DataSeries::from_points(&[(0.0, 1.0), (-0.5, 2.0)]).is_err());
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(DataSeries::new(0.0, 1.0, vec![]).is_err());
        assert!(DataSeries::new(0.0, 0.0, vec![1.0]).is_err());
    }

    proptest! {
        #[test]
        fn trapezoid_is_linear(
            f in prop::collection::vec(-10.0f64..10.0, 2..40),
            seed in prop::collection::vec(-10.0f64..10.0, 40),
            alpha in -5.0f64..5.0,
            beta in -5.0f64..5.0,
        ) {
            let g: Vec<f64> = seed[..f.len()].to_vec();
            let sf = DataSeries::new(0.0, 0.3, f.clone()).unwrap();
            let sg = DataSeries::new(0.0, 0.3, g.clone()).unwrap();
            let combo = DataSeries::new(0.0, 0.3, f.iter().zip(&g).map(|(x, y)| alpha * x + beta * y).collect()).unwrap();
            let lhs = trapezoid_integral(&combo).unwrap();
            let rhs = alpha * trapezoid_integral(&sf).unwrap() + beta * trapezoid_integral(&sg).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
        }
    }
}
