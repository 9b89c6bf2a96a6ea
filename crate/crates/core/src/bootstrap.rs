//! Shuffle test for multifractality.
//!
//! Each replicate is a uniform random permutation of the day's values,
//! pushed through the same pipeline as the original. The replicate cloud of
//! `(Δα_rnd, F_rnd)` gives the fitted line `F_rnd = k Δα_rnd + b` and two
//! one-sided p-values:
//!
//! * `p1 = #{Δα ≤ Δα_rnd} / B`
//! * `p2 = #{F ≥ F_rnd} / B`
//!
//! Both comparisons are non-strict and no `+1` correction is applied, so the
//! p-values can be exactly 0 or 1. Replicate `i` draws its permutation from
//! [`crate::rng::stream_rng`]`(master_seed, i)`, which makes a report a pure
//! function of its inputs regardless of how replicates are scheduled.

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::stats_of_values;
use crate::error::{Error, Result};
use crate::ingest::{BoxScheme, PriceSeries};
use crate::partition::MomentGrid;
use crate::rng::{fisher_yates, stream_rng};
use crate::spectrum::SpectrumStats;
use crate::stats::ols;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub master_seed: u64,
    pub significance_level: f64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            replicates: 1000,
            master_seed: 0,
            significance_level: 0.05,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidParameter(
                "replicate count must be ≥ 1".into(),
            ));
        }
        check_level(self.significance_level)
    }
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "significance level {level} not in (0, 1)"
        )))
    }
}

/// Permutes `values` in place with the stream for `replicate_index`.
pub fn shuffle_values(values: &mut [f64], replicate_index: u64, master_seed: u64) {
    let mut rng = stream_rng(master_seed, replicate_index);
    fisher_yates(values, &mut rng);
}

pub fn shuffle_series(series: &PriceSeries, replicate_index: u64, master_seed: u64) -> PriceSeries {
    let mut values = series.values().to_vec();
    shuffle_values(&mut values, replicate_index, master_seed);
    series.with_values_unchecked(values)
}

/// Least-squares line through the replicate cloud.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatterLine {
    pub k: f64,
    pub b: f64,
    /// Root-mean-square residual of the fit (`n − 2` degrees of freedom).
    pub residual_sd: f64,
}

impl ScatterLine {
    pub fn predict(&self, delta_alpha: f64) -> f64 {
        self.k * delta_alpha + self.b
    }
}

pub fn scatter_fit(replicates: &[SpectrumStats]) -> Result<ScatterLine> {
    if replicates.len() < 2 {
        return Err(Error::DegenerateScatter(format!(
            "{} replicate(s); at least 2 are needed",
            replicates.len()
        )));
    }
    let xs: Vec<f64> = replicates.iter().map(|s| s.delta_alpha).collect();
    let ys: Vec<f64> = replicates.iter().map(|s| s.big_f).collect();
    let fit = ols(&xs, &ys)
        .ok_or_else(|| Error::DegenerateScatter("every replicate has the same Δα".into()))?;
    let n = xs.len() as f64;
    let residual_sd = if xs.len() > 2 {
        let ssr: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - (fit.slope * x + fit.intercept)).powi(2))
            .sum();
        (ssr / (n - 2.0)).sqrt()
    } else {
        0.0
    };
    Ok(ScatterLine {
        k: fit.slope,
        b: fit.intercept,
        residual_sd,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapReport {
    pub day: String,
    pub original: SpectrumStats,
    pub replicates: Vec<SpectrumStats>,
    /// `None` when the replicate cloud is degenerate (e.g. a constant day).
    pub line: Option<ScatterLine>,
    pub p1: f64,
    pub p2: f64,
    pub significance_level: f64,
    pub significant_1: bool,
    pub significant_2: bool,
}

impl BootstrapReport {
    /// Mean of the replicate statistics.
    pub fn replicate_mean(&self) -> SpectrumStats {
        let n = self.replicates.len() as f64;
        SpectrumStats {
            delta_alpha: self.replicates.iter().map(|s| s.delta_alpha).sum::<f64>() / n,
            big_f: self.replicates.iter().map(|s| s.big_f).sum::<f64>() / n,
        }
    }

    /// Distance of the original point from the replicate line, in units of
    /// the line's residual standard deviation.
    pub fn original_line_deviation(&self) -> Option<f64> {
        let line = self.line?;
        let gap = (self.original.big_f - line.predict(self.original.delta_alpha)).abs();
        (line.residual_sd > 0.0).then(|| gap / line.residual_sd)
    }

    /// Soft checks that should hold for monofractal-like input; returned
    /// rather than enforced.
    pub fn consistency_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if (self.p1 - self.p2).abs() > 0.1 {
            out.push(format!(
                "day {}: p1 = {} and p2 = {} differ by more than 0.1",
                self.day, self.p1, self.p2
            ));
        }
        if let Some(dev) = self.original_line_deviation().filter(|&d| d > 3.0) {
            out.push(format!(
                "day {}: original (Δα, F) lies {dev:.2} residual SDs off the replicate line",
                self.day
            ));
        }
        out
    }

    pub fn to_json(&self, include_replicates: bool) -> BootstrapJson<'_> {
        BootstrapJson {
            day: &self.day,
            delta_alpha: self.original.delta_alpha,
            big_f: self.original.big_f,
            k: self.line.map(|l| l.k),
            b: self.line.map(|l| l.b),
            p1: self.p1,
            p2: self.p2,
            significant_1: self.significant_1,
            significant_2: self.significant_2,
            replicate_count: self.replicates.len(),
            significance_level: self.significance_level,
            replicates: include_replicates.then_some(&self.replicates),
        }
    }
}

/// JSON form of a [`BootstrapReport`].
#[derive(Debug, Serialize)]
pub struct BootstrapJson<'a> {
    pub day: &'a str,
    pub delta_alpha: f64,
    #[serde(rename = "F")]
    pub big_f: f64,
    pub k: Option<f64>,
    pub b: Option<f64>,
    pub p1: f64,
    pub p2: f64,
    pub significant_1: bool,
    pub significant_2: bool,
    pub replicate_count: usize,
    pub significance_level: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicates: Option<&'a Vec<SpectrumStats>>,
}

pub fn bootstrap_analysis(
    series: &PriceSeries,
    scheme: &BoxScheme,
    grid: &MomentGrid,
    cfg: &BootstrapConfig,
) -> Result<BootstrapReport> {
    cfg.validate()?;
    let original = stats_of_values(series.values(), scheme, grid)?;

    let replicates = (0..cfg.replicates as u64)
        .into_par_iter()
        .map(|i| {
            let mut values = series.values().to_vec();
            shuffle_values(&mut values, i, cfg.master_seed);
            stats_of_values(&values, scheme, grid)
        })
        .collect::<Result<Vec<_>>>()?;

    let b = replicates.len() as f64;
    let p1 = replicates
        .iter()
        .filter(|r| original.delta_alpha <= r.delta_alpha)
        .count() as f64
        / b;
    let p2 = replicates
        .iter()
        .filter(|r| original.big_f >= r.big_f)
        .count() as f64
        / b;

    Ok(BootstrapReport {
        day: series.day_id().to_string(),
        original,
        line: scatter_fit(&replicates).ok(),
        replicates,
        p1,
        p2,
        significance_level: cfg.significance_level,
        significant_1: p1 <= cfg.significance_level,
        significant_2: p2 <= cfg.significance_level,
    })
}

/// Runs [`bootstrap_analysis`] for many days; output order follows `days`.
pub fn bootstrap_days(
    days: &[PriceSeries],
    scheme: &BoxScheme,
    grid: &MomentGrid,
    cfg: &BootstrapConfig,
) -> Result<Vec<BootstrapReport>> {
    days.par_iter()
        .map(|d| bootstrap_analysis(d, scheme, grid, cfg))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DayRow {
    pub day: String,
    pub delta_alpha: f64,
    #[serde(rename = "F")]
    pub big_f: f64,
    pub p1: f64,
    pub p2: f64,
    pub significant_1: bool,
    pub significant_2: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchSummary {
    pub days: usize,
    pub significance_level: f64,
    /// Percentage (0–100) of days with `p1 ≤ level`.
    pub pct_p1_significant: f64,
    /// Percentage (0–100) of days with `p2 ≤ level`.
    pub pct_p2_significant: f64,
    pub per_day: Vec<DayRow>,
}

pub fn batch_summary(reports: &[BootstrapReport], level: f64) -> Result<BatchSummary> {
    if reports.is_empty() {
        return Err(Error::InvalidParameter("batch summary of zero days".into()));
    }
    check_level(level)?;
    let n = reports.len() as f64;
    let per_day: Vec<DayRow> = reports
        .iter()
        .map(|r| DayRow {
            day: r.day.clone(),
            delta_alpha: r.original.delta_alpha,
            big_f: r.original.big_f,
            p1: r.p1,
            p2: r.p2,
            significant_1: r.p1 <= level,
            significant_2: r.p2 <= level,
        })
        .collect();
    let pct = |f: fn(&DayRow) -> bool| 100.0 * per_day.iter().filter(|r| f(r)).count() as f64 / n;
    Ok(BatchSummary {
        days: reports.len(),
        significance_level: level,
        pct_p1_significant: pct(|r| r.significant_1),
        pct_p2_significant: pct(|r| r.significant_2),
        per_day,
    })
}
