use crate::diff::FilterSpec;
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::potential::{InitialCondition, Potential};

/// Complete description of one reconstruction experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid: Grid1D,
    pub potential: Potential,
    pub initial_condition: InitialCondition,
    /// Signed node index `m` of the observation point `x_m`.
    pub observation_index: i64,
    /// Number of Monte Carlo realizations.
    pub paths: usize,
    /// Relative measurement-noise level; 0 means noise-free data.
    pub epsilon: f64,
    pub filter: FilterSpec,
    pub base_seed: u64,
}

impl RunConfig {
    /// Settings of the smooth benchmark: `a = T = 1`, `M = 50`, `N = 128`,
    /// `u0 = exp(-16 x^2)`, observation at `x = 0`, `q = sin(pi t)`.
    pub fn benchmark() -> Self {
        Self {
            grid: Grid1D::new(1.0, 1.0, 50, 128).expect("benchmark grid is valid"),
            potential: Potential::Sine { amplitude: 1.0 },
            initial_condition: InitialCondition::Gaussian { sharpness: 16.0 },
            observation_index: 0,
            paths: 10_000,
            epsilon: 0.1,
            filter: FilterSpec::Tikhonov { mu: 0.03 },
            base_seed: 20_240_601,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.paths < 1 {
            return Err(Error::invalid("P must be at least 1"));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::invalid(format!(
                "epsilon must be >= 0, got {}",
                self.epsilon
            )));
        }
        if !self.grid.is_interior(self.observation_index) {
            return Err(Error::invalid(format!(
                "observation_index {} is not interior (|m| must be < {})",
                self.observation_index,
                self.grid.m()
            )));
        }
        self.filter.validate()
    }

    pub fn observation_point(&self) -> f64 {
        self.grid.x(self.observation_index)
    }
}
