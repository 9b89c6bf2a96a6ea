//! The per-day pipeline: measure → partition surface → τ(q) → spectrum.

use serde::Serialize;

use crate::error::Result;
use crate::ingest::{BoxScheme, PriceSeries};
use crate::partition::{surface_from_values, MomentGrid, MomentMethod, PartitionSurface};
use crate::scaling::{fit_mass_exponents, tau_linearity_report, LinearityReport, MassExponents};
use crate::spectrum::{legendre_spectrum, SingularitySpectrum, SpectrumStats};

#[derive(Debug, Clone)]
pub struct DayAnalysis {
    pub day: String,
    pub surface: PartitionSurface,
    pub exponents: MassExponents,
    pub linearity: LinearityReport,
    pub spectrum: SingularitySpectrum,
}

/// Scalar summary of one day, as written to `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DaySummary {
    pub day: String,
    pub length: usize,
    pub box_sizes: Vec<usize>,
    pub alpha_bar: f64,
    pub alpha_bar_stderr: f64,
    pub tau_line_correlation: f64,
    pub max_tau_residual: f64,
    pub delta_alpha: f64,
    #[serde(rename = "F")]
    pub big_f: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub max_alpha_increase: f64,
}

impl DayAnalysis {
    pub fn stats(&self) -> SpectrumStats {
        self.spectrum.stats()
    }

    pub fn summary(&self) -> DaySummary {
        let s = &self.spectrum;
        DaySummary {
            day: self.day.clone(),
            length: self.surface.scheme().series_length(),
            box_sizes: self.surface.scheme().sizes().to_vec(),
            alpha_bar: self.linearity.alpha_bar,
            alpha_bar_stderr: self.linearity.alpha_bar_stderr,
            tau_line_correlation: self.linearity.line_correlation,
            max_tau_residual: self.linearity.max_abs_residual_from_line,
            delta_alpha: s.delta_alpha,
            big_f: s.big_f,
            alpha_min: s.alpha[s.alpha_min_index],
            alpha_max: s.alpha[s.alpha_max_index],
            max_alpha_increase: s.max_alpha_increase(),
        }
    }
}

pub fn analyze_series(
    series: &PriceSeries,
    scheme: &BoxScheme,
    grid: &MomentGrid,
) -> Result<DayAnalysis> {
    let surface = surface_from_values(series.values(), scheme, grid, MomentMethod::Auto)?;
    let exponents = fit_mass_exponents(&surface)?;
    let linearity = tau_linearity_report(&exponents);
    let spectrum = legendre_spectrum(&exponents)?;
    Ok(DayAnalysis {
        day: series.day_id().to_string(),
        surface,
        exponents,
        linearity,
        spectrum,
    })
}

/// `(Δα, F)` of a raw value sequence; the bootstrap inner loop.
pub(crate) fn stats_of_values(
    values: &[f64],
    scheme: &BoxScheme,
    grid: &MomentGrid,
) -> Result<SpectrumStats> {
    let surface = surface_from_values(values, scheme, grid, MomentMethod::Auto)?;
    let exponents = fit_mass_exponents(&surface)?;
    Ok(legendre_spectrum(&exponents)?.stats())
}
