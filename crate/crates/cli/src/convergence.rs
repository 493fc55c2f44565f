//! Refinement studies written as rate tables.

use std::path::Path;

use spde_inverse::{fd_convergence_probe, fitted_order, strong_convergence_probe, LevelError};

use crate::config::ExperimentConfig;
use crate::csvio::{write_table, Cell};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Study {
    Heat,
    Spde,
}

pub const TEMPORAL_HALVINGS: usize = 4;
pub const SPATIAL_HALVINGS: usize = 3;
pub const STRONG_HALVINGS: usize = 3;

/// One refinement ladder with its fitted order.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    pub study: &'static str,
    pub levels: Vec<LevelError>,
    pub fitted_order: f64,
}

fn table(
    study: &'static str,
    levels: Vec<LevelError>,
    step: impl Fn(&LevelError) -> f64,
) -> RateTable {
    let steps: Vec<f64> = levels.iter().map(&step).collect();
    let errors: Vec<f64> = levels.iter().map(|l| l.error).collect();
    RateTable {
        study,
        fitted_order: fitted_order(&steps, &errors),
        levels,
    }
}

/// Heat: a temporal ladder on a spatial grid 8x finer than `M`, starting
/// from `N/8` steps, and a spatial ladder from `M/5` half-intervals with
/// `2048 N` steps. Spde: `N, 2N, ...` steps on the configured grid with
/// `P` paths.
pub fn rate_tables(study: Study, c: &ExperimentConfig) -> Result<Vec<RateTable>> {
    let u0 = c.u0.to_initial(c.a)?;
    Ok(match study {
        Study::Heat => {
            let m_t = 8 * c.m;
            let n0 = (c.n / 8).max(2);
            let temporal: Vec<_> = (0..=TEMPORAL_HALVINGS).map(|k| (m_t, n0 << k)).collect();
            let m0 = (c.m / 5).max(2);
            let n_s = 2048 * c.n;
            let spatial: Vec<_> = (0..=SPATIAL_HALVINGS).map(|k| (m0 << k, n_s)).collect();
            vec![
                table(
                    "temporal",
                    fd_convergence_probe(c.a, c.t_final, &u0, &temporal)?,
                    |l| l.tau,
                ),
                table(
                    "spatial",
                    fd_convergence_probe(c.a, c.t_final, &u0, &spatial)?,
                    |l| l.h,
                ),
            ]
        }
        Study::Spde => {
            let q = c.potential.to_potential()?;
            let levels = strong_convergence_probe(
                &q,
                &u0,
                &c.grid()?,
                STRONG_HALVINGS,
                c.paths,
                c.base_seed,
            )?;
            vec![table("strong", levels, |l| l.tau)]
        }
    })
}

/// Columns: `study, M, N, h, tau, error, fitted_order`.
pub fn run_convergence(study: Study, c: &ExperimentConfig, out: &Path) -> Result<Vec<RateTable>> {
    let tables = rate_tables(study, c)?;
    let rows = tables.iter().flat_map(|t| {
        t.levels.iter().map(move |l| {
            vec![
                Cell::S(t.study.to_string()),
                Cell::U(l.m as u64),
                Cell::U(l.n as u64),
                Cell::F(l.h),
                Cell::F(l.tau),
                Cell::F(l.error),
                Cell::F(t.fitted_order),
            ]
        })
    });
    write_table(
        out,
        &["study", "M", "N", "h", "tau", "error", "fitted_order"],
        rows,
    )?;
    Ok(tables)
}
