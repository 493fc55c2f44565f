//! Uniform space-time grid on `[-a, a] x [0, T]`.
//!
//! Spatial nodes are `x_m = m h` for `m = -M..=M` with `h = a / M`, so the
//! boundary nodes `m = +-M` sit exactly at `+-a`. Temporal nodes are
//! `t_n = n tau` for `n = 0..=N` with `tau = T / N`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    a: f64,
    t_final: f64,
    m: usize,
    n: usize,
    h: f64,
    tau: f64,
}

impl Grid1D {
    pub fn new(a: f64, t_final: f64, m: usize, n: usize) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::invalid(format!(
                "half-width a must be positive, got {a}"
            )));
        }
        if !(t_final.is_finite() && t_final > 0.0) {
            return Err(Error::invalid(format!(
                "final time T must be positive, got {t_final}"
            )));
        }
        if m < 2 {
            return Err(Error::invalid(format!("M must be at least 2, got {m}")));
        }
        if n < 2 {
            return Err(Error::invalid(format!("N must be at least 2, got {n}")));
        }
        Ok(Self {
            a,
            t_final,
            m,
            n,
            h: a / m as f64,
            tau: t_final / n as f64,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    /// Subintervals per half-domain.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Temporal subintervals.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Spatial node count, `2M + 1`.
    pub fn num_nodes(&self) -> usize {
        2 * self.m + 1
    }

    /// Temporal node count, `N + 1`.
    pub fn num_times(&self) -> usize {
        self.n + 1
    }

    /// Storage column of signed node index `m`.
    pub fn column(&self, m: i64) -> Option<usize> {
        let shifted = m + self.m as i64;
        (0..self.num_nodes() as i64)
            .contains(&shifted)
            .then_some(shifted as usize)
    }

    /// Position of the node with signed index `m`.
    pub fn x(&self, m: i64) -> f64 {
        m as f64 * self.h
    }

    /// Position of the node stored at column `col`.
    pub fn x_at_column(&self, col: usize) -> f64 {
        self.x(col as i64 - self.m as i64)
    }

    pub fn t(&self, n: usize) -> f64 {
        n as f64 * self.tau
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.num_nodes()).map(|c| self.x_at_column(c)).collect()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.num_times()).map(|n| self.t(n)).collect()
    }

    /// Whether `m` indexes an interior node, i.e. `|m| <= M - 1`.
    pub fn is_interior(&self, m: i64) -> bool {
        m.unsigned_abs() < self.m as u64
    }

    /// Same grid with a different temporal resolution.
    pub fn with_steps(&self, n: usize) -> Result<Self> {
        Self::new(self.a, self.t_final, self.m, n)
    }

    /// Same grid with a different spatial resolution.
    pub fn with_half_intervals(&self, m: usize) -> Result<Self> {
        Self::new(self.a, self.t_final, m, self.n)
    }
}
