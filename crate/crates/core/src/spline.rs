//! Natural cubic spline through arbitrary increasing knots.

use crate::error::{Error, Result};
use crate::tridiag::solve_tridiagonal;

#[derive(Debug, Clone, PartialEq)]
pub struct NaturalCubicSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    /// Second derivatives at the knots; zero at both ends.
    curvature: Vec<f64>,
}

impl NaturalCubicSpline {
    pub fn fit(knots: &[f64], values: &[f64]) -> Result<Self> {
        let n = knots.len();
        if n < 2 || values.len() != n {
            return Err(Error::invalid(
                "spline needs at least two knots and one value per knot",
            ));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("spline knots must be strictly increasing"));
        }
        let mut curvature = vec![0.0; n];
        if n > 2 {
            let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
            let slope: Vec<f64> = (0..n - 1)
                .map(|i| (values[i + 1] - values[i]) / h[i])
                .collect();
            let k = n - 2;
            let mut lower = vec![0.0; k];
            let mut diag = vec![0.0; k];
            let mut upper = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            for r in 0..k {
                let i = r + 1;
                lower[r] = h[i - 1];
                diag[r] = 2.0 * (h[i - 1] + h[i]);
                upper[r] = h[i];
                rhs[r] = 6.0 * (slope[i] - slope[i - 1]);
            }
            let inner = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;
            curvature[1..n - 1].copy_from_slice(&inner);
        }
        Ok(Self {
            knots: knots.to_vec(),
            values: values.to_vec(),
            curvature,
        })
    }

    /// Spline value; linear continuation outside the knot range.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.knots.len();
        let i = self.knots.partition_point(|&k| k <= x).clamp(1, n - 1) - 1;
        let (x0, x1) = (self.knots[i], self.knots[i + 1]);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.curvature[i], self.curvature[i + 1]);
        let h = x1 - x0;
        if x < self.knots[0] || x > self.knots[n - 1] {
            let edge = if x < self.knots[0] { x0 } else { x1 };
            let slope = if x < self.knots[0] {
                (y1 - y0) / h - h * (2.0 * m0 + m1) / 6.0
            } else {
                (y1 - y0) / h + h * (m0 + 2.0 * m1) / 6.0
            };
            let base = if x < self.knots[0] { y0 } else { y1 };
            return base + slope * (x - edge);
        }
        let a = x1 - x;
        let b = x - x0;
        m0 * a * a * a / (6.0 * h)
            + m1 * b * b * b / (6.0 * h)
            + (y0 / h - m0 * h / 6.0) * a
            + (y1 / h - m1 * h / 6.0) * b
    }
}
