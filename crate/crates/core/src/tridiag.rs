//! Thomas algorithm for tridiagonal systems with constant bands.

use crate::error::{Error, Result};

/// Pre-factored tridiagonal matrix with constant sub-, main and
/// super-diagonal entries. Factoring once lets every time step reuse the
/// elimination multipliers.
#[derive(Debug, Clone)]
pub struct ConstTridiagonal {
    lower: f64,
    /// Modified super-diagonal `c'_i`.
    upper_mod: Vec<f64>,
    /// Reciprocal pivots `1 / (b - a c'_{i-1})`.
    inv_pivot: Vec<f64>,
}

impl ConstTridiagonal {
    /// Factor the `n x n` matrix with `lower` below, `diag` on and `upper`
    /// above the diagonal. Requires strict diagonal dominance so the
    /// elimination needs no pivoting.
    pub fn new(n: usize, lower: f64, diag: f64, upper: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("tridiagonal system must be non-empty"));
        }
        if diag.abs() <= lower.abs() + upper.abs() && n > 1 {
            return Err(Error::invalid(
                "tridiagonal matrix is not strictly diagonally dominant",
            ));
        }
        let mut upper_mod = vec![0.0; n];
        let mut inv_pivot = vec![0.0; n];
        let mut prev = 0.0;
        for i in 0..n {
            let pivot = diag - lower * prev;
            inv_pivot[i] = 1.0 / pivot;
            prev = upper * inv_pivot[i];
            upper_mod[i] = prev;
        }
        Ok(Self {
            lower,
            upper_mod,
            inv_pivot,
        })
    }

    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    /// Overwrite `rhs` with the solution.
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        debug_assert_eq!(rhs.len(), self.len());
        let n = rhs.len();
        let mut prev = 0.0;
        for i in 0..n {
            prev = (rhs[i] - self.lower * prev) * self.inv_pivot[i];
            rhs[i] = prev;
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.upper_mod[i] * rhs[i + 1];
        }
    }
}

/// Solves a general tridiagonal system by elimination without pivoting.
/// `lower[i]` multiplies `x[i - 1]` in row `i` (so `lower[0]` is unused),
/// `upper[i]` multiplies `x[i + 1]` (so `upper[n - 1]` is unused).
pub fn solve_tridiagonal(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &[f64],
) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 || lower.len() != n || upper.len() != n || rhs.len() != n {
        return Err(Error::invalid(
            "tridiagonal bands and right-hand side must share one length",
        ));
    }
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut prev_c = 0.0;
    let mut prev_x = 0.0;
    for i in 0..n {
        let pivot = diag[i] - lower[i] * prev_c;
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::invalid("singular tridiagonal system"));
        }
        prev_c = upper[i] / pivot;
        prev_x = (rhs[i] - lower[i] * prev_x) / pivot;
        c[i] = prev_c;
        x[i] = prev_x;
    }
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn general_solver_matches_constant_solver() {
        let n = 9;
        let t = ConstTridiagonal::new(n, -0.7, 2.5, -0.4).unwrap();
        let rhs: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let mut want = rhs.clone();
        t.solve_in_place(&mut want);
        let got = solve_tridiagonal(&vec![-0.7; n], &vec![2.5; n], &vec![-0.4; n], &rhs).unwrap();
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-14);
        }
        assert!(solve_tridiagonal(&[0.0], &[0.0], &[0.0], &[1.0]).is_err());
        assert!(solve_tridiagonal(&[0.0], &[1.0, 2.0], &[0.0], &[1.0]).is_err());
    }
    use proptest::prelude::*;

    fn apply(n: usize, l: f64, d: f64, u: f64, x: &[f64]) -> Vec<f64> {
        (0..n)
            .map(|i| {
                let mut y = d * x[i];
                if i > 0 {
                    y += l * x[i - 1];
                }
                if i + 1 < n {
                    y += u * x[i + 1];
                }
                y
            })
            .collect()
    }

    #[test]
    fn identity_like() {
        let t = ConstTridiagonal::new(1, 0.0, 2.0, 0.0).unwrap();
        let mut r = vec![3.0];
        t.solve_in_place(&mut r);
        assert_eq!(r, vec![1.5]);
    }

    #[test]
    fn rejects_non_dominant() {
        assert!(ConstTridiagonal::new(5, -1.0, 2.0, -1.0).is_err());
        assert!(ConstTridiagonal::new(0, -1.0, 3.0, -1.0).is_err());
    }

    proptest! {
        #[test]
        fn residual_small(
            x in prop::collection::vec(-1.0f64..1.0, 1..60),
            r in 0.0f64..1e4,
        ) {
            let n = x.len();
            let (l, d, u) = (-r, 1.0 + 2.0 * r + 1e-9, -r);
            let t = ConstTridiagonal::new(n, l, d, u).unwrap();
            let mut b = apply(n, l, d, u, &x);
            t.solve_in_place(&mut b);
            for (got, want) in b.iter().zip(&x) {
                prop_assert!((got - want).abs() <= 1e-8 * (1.0 + r));
            }
        }
    }
}
