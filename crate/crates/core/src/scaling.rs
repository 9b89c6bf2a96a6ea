//! Mass exponents `τ(q)`: slopes of `ln χ_q(l)` against `ln l`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::partition::{MomentGrid, PartitionSurface};
use crate::stats::ols;

#[derive(Debug, Clone, PartialEq)]
pub struct MassExponents {
    pub grid: MomentGrid,
    pub tau: Vec<f64>,
    /// Pearson correlation of each `ln χ_q(l)` vs `ln l` fit.
    pub r: Vec<f64>,
    /// OLS slope of `τ(q)` on `q`.
    pub alpha_bar: f64,
    /// OLS standard error of `alpha_bar`.
    pub alpha_bar_stderr: f64,
}

impl MassExponents {
    /// Builds exponents directly from a `τ` table, e.g. a closed form.
    pub fn from_tau(grid: MomentGrid, tau: Vec<f64>) -> Result<Self> {
        if tau.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "tau has {} entries for a grid of {}",
                tau.len(),
                grid.len()
            )));
        }
        let line = ols(grid.values(), &tau)
            .ok_or_else(|| Error::Numeric("grid has fewer than two points".into()))?;
        Ok(MassExponents {
            r: vec![1.0; tau.len()],
            alpha_bar: line.slope,
            alpha_bar_stderr: line.slope_stderr,
            grid,
            tau,
        })
    }

    pub fn tau_at(&self, q: f64) -> Option<f64> {
        self.grid.index_of(q).map(|i| self.tau[i])
    }
}

const EXACT_FIT: f64 = 1e-12;

pub fn fit_mass_exponents(surface: &PartitionSurface) -> Result<MassExponents> {
    let sizes = surface.scheme().sizes();
    if sizes.len() < 2 {
        return Err(Error::InvalidScheme(
            "at least two box sizes are needed".into(),
        ));
    }
    let ln_l: Vec<f64> = sizes.iter().map(|&l| (l as f64).ln()).collect();
    let grid = surface.grid().clone();
    let mut tau = Vec::with_capacity(grid.len());
    let mut r = Vec::with_capacity(grid.len());
    for qi in 0..grid.len() {
        let fit = ols(&ln_l, surface.row(qi))
            .ok_or_else(|| Error::Numeric("degenerate box sizes".into()))?;
        tau.push(fit.slope);
        // residuals at round-off level: the points lie on a line
        r.push(if fit.max_abs_residual <= EXACT_FIT {
            if fit.slope < 0.0 {
                -1.0
            } else {
                1.0
            }
        } else {
            fit.r
        });
    }
    let line = ols(grid.values(), &tau)
        .ok_or_else(|| Error::Numeric("grid has fewer than two points".into()))?;
    Ok(MassExponents {
        grid,
        tau,
        r,
        alpha_bar: line.slope,
        alpha_bar_stderr: line.slope_stderr,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearityReport {
    pub alpha_bar: f64,
    pub alpha_bar_stderr: f64,
    pub intercept: f64,
    /// Correlation of the `τ` vs `q` line fit.
    pub line_correlation: f64,
    pub max_abs_residual_from_line: f64,
}

/// How far `τ(q)` strays from its best straight line in `q`.
pub fn tau_linearity_report(me: &MassExponents) -> LinearityReport {
    let line = ols(me.grid.values(), &me.tau).expect("grid has at least two distinct points");
    LinearityReport {
        alpha_bar: line.slope,
        alpha_bar_stderr: line.slope_stderr,
        intercept: line.intercept,
        line_correlation: line.r,
        max_abs_residual_from_line: line.max_abs_residual,
    }
}
