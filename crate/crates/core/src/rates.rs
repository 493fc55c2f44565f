//! Observed errors per refinement level and least-squares order fits.

/// Error observed on one `(M, N)` refinement level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelError {
    pub m: usize,
    pub n: usize,
    pub h: f64,
    pub tau: f64,
    pub error: f64,
}

/// Least-squares slope of `ln(error)` against `ln(step)`.
///
/// Returns NaN for fewer than two levels or when any input is non-positive.
pub fn fitted_order(steps: &[f64], errors: &[f64]) -> f64 {
    if steps.len() != errors.len() || steps.len() < 2 {
        return f64::NAN;
    }
    if steps.iter().chain(errors).any(|&v| !(v > 0.0)) {
        return f64::NAN;
    }
    let xs: Vec<f64> = steps.iter().map(|s| s.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
