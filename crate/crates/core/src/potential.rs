//! Time-dependent potentials `q(t)` and initial conditions `u0(x)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::series::DataSeries;

#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    /// `q(t) = c`.
    Constant(f64),
    /// `q(t) = amplitude * sin(pi t)`; amplitude 1 is the smooth benchmark.
    Sine { amplitude: f64 },
    /// Continuous, with kinks at `t = 1/5, 1/2, 4/5`.
    PiecewiseRoot,
    /// Piecewise constant with values 0, 1, 2, 0.
    PiecewiseConstant,
    /// Linear interpolation of tabulated samples, held constant outside.
    Tabulated(DataSeries),
    /// `-q(t)` for the wrapped potential.
    Negated(Box<Potential>),
}

impl Potential {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Potential::Constant(c) => *c,
            Potential::Sine { amplitude } => amplitude * (PI * t).sin(),
            Potential::PiecewiseRoot => {
                if t <= 0.2 {
                    0.0
                } else if t <= 0.5 {
                    4.0 * (t - 0.2).sqrt()
                } else if t <= 0.8 {
                    4.0 * (0.8 - t).sqrt()
                } else {
                    0.0
                }
            }
            Potential::PiecewiseConstant => {
                if t <= 0.2 {
                    0.0
                } else if t <= 0.5 {
                    1.0
                } else if t <= 0.8 {
                    2.0
                } else {
                    0.0
                }
            }
            Potential::Tabulated(series) => linear_lookup(series, t),
            Potential::Negated(inner) => -inner.eval(t),
        }
    }

    pub fn eval_squared(&self, t: f64) -> f64 {
        let q = self.eval(t);
        q * q
    }

    /// Same potential with the sign flipped.
    pub fn negated(&self) -> Self {
        match self {
            Potential::Constant(c) => Potential::Constant(-c),
            Potential::Sine { amplitude } => Potential::Sine {
                amplitude: -amplitude,
            },
            Potential::Tabulated(s) => Potential::Tabulated(s.map(|_, v| -v)),
            Potential::Negated(inner) => (**inner).clone(),
            other => Potential::Negated(Box::new(other.clone())),
        }
    }
}

fn linear_lookup(series: &DataSeries, t: f64) -> f64 {
    let v = series.values();
    if v.len() == 1 {
        return v[0];
    }
    let s = (t - series.t0()) / series.dt();
    if s <= 0.0 {
        return v[0];
    }
    let last = v.len() - 1;
    if s >= last as f64 {
        return v[last];
    }
    let k = s.floor() as usize;
    let w = s - k as f64;
    (1.0 - w) * v[k] + w * v[k + 1]
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// `u0(x) = exp(-sharpness x^2)`.
    Gaussian { sharpness: f64 },
    /// First Dirichlet eigenfunction shape `sin(pi (x + a) / (2a))`.
    FirstEigenmode { a: f64 },
    /// Piecewise-linear through `(x, value)` pairs sorted by `x`.
    Tabulated(Vec<(f64, f64)>),
}

impl InitialCondition {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            InitialCondition::Gaussian { sharpness } => (-sharpness * x * x).exp(),
            InitialCondition::FirstEigenmode { a } => (PI * (x + a) / (2.0 * a)).sin(),
            InitialCondition::Tabulated(points) => {
                let i = points.partition_point(|&(px, _)| px <= x);
                if i == 0 {
                    points[0].1
                } else if i == points.len() {
                    points[points.len() - 1].1
                } else {
                    let (x0, y0) = points[i - 1];
                    let (x1, y1) = points[i];
                    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
                }
            }
        }
    }

    pub fn tabulated(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid(
                "tabulated initial condition needs at least one point",
            ));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::invalid(
                "tabulated initial condition must have increasing x",
            ));
        }
        Ok(InitialCondition::Tabulated(points))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn piecewise_root_breakpoints() {
        let q = Potential::PiecewiseRoot;
        assert_eq!(q.eval(0.2), 0.0);
        assert_abs_diff_eq!(q.eval(0.5), 4.0 * 0.3f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(q.eval(0.8), 0.0, epsilon = 1e-7);
        // continuity at the breakpoints
        for b in [0.2, 0.5, 0.8] {
            assert!((q.eval(b - 1e-10) - q.eval(b + 1e-10)).abs() < 1e-4);
        }
    }

    #[test]
    fn piecewise_constant_closures() {
        let q = Potential::PiecewiseConstant;
        assert_eq!(q.eval(0.0), 0.0);
        assert_eq!(q.eval(0.2), 0.0);
        assert_eq!(q.eval(0.2 + 1e-12), 1.0);
        assert_eq!(q.eval(0.5), 1.0);
        assert_eq!(q.eval(0.5 + 1e-12), 2.0);
        assert_eq!(q.eval(0.8), 2.0);
        assert_eq!(q.eval(0.8 + 1e-12), 0.0);
        assert_eq!(q.eval(1.0), 0.0);
    }

    #[test]
    fn tabulated_interpolates() {
        let s = DataSeries::new(0.0, 0.5, vec![0.0, 1.0, 3.0]).unwrap();
        let q = Potential::Tabulated(s);
        assert_eq!(q.eval(-1.0), 0.0);
        assert_abs_diff_eq!(q.eval(0.25), 0.5);
        assert_abs_diff_eq!(q.eval(0.75), 2.0);
        assert_eq!(q.eval(5.0), 3.0);
    }

    #[test]
    fn negation_squares_agree() {
        for q in [
            Potential::Constant(0.7),
            Potential::Sine { amplitude: 1.0 },
            Potential::PiecewiseRoot,
            Potential::PiecewiseConstant,
        ] {
            let neg = q.negated();
            for k in 0..=64 {
                let t = k as f64 / 64.0;
                assert_abs_diff_eq!(q.eval_squared(t), neg.eval_squared(t), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn initial_conditions() {
        assert_abs_diff_eq!(
            InitialCondition::Gaussian { sharpness: 16.0 }.eval(0.5),
            (-4.0f64).exp()
        );
        let e = InitialCondition::FirstEigenmode { a: 1.0 };
        assert_abs_diff_eq!(e.eval(0.0), 1.0);
        assert_abs_diff_eq!(e.eval(-1.0), 0.0);
        let t = InitialCondition::tabulated(vec![(-1.0, 0.0), (0.0, 2.0), (1.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(t.eval(0.5), 1.0);
        assert!(InitialCondition::tabulated(vec![(0.0, 1.0), (0.0, 2.0)]).is_err());
    }
}
