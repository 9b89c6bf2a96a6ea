//! Box measure: the series coarse-grained into non-overlapping boxes of
//! `l` consecutive samples, with normalized weights kept in log space.

use crate::error::{Error, Result};
use crate::ingest::PriceSeries;
use crate::stats::compensated_sum;

#[derive(Debug, Clone, PartialEq)]
pub struct BoxMeasure {
    box_size: usize,
    raw_mass: Vec<f64>,
    log_weights: Vec<f64>,
    // ascending copy of `log_weights`; moment sums run over this order so a
    // result depends only on the multiset of weights
    sorted_log_weights: Vec<f64>,
}

impl BoxMeasure {
    pub fn box_size(&self) -> usize {
        self.box_size
    }

    /// Box masses `μ(n; l)`, `n = 1..N`.
    pub fn raw_mass(&self) -> &[f64] {
        &self.raw_mass
    }

    /// `ln u_n = ln(μ(n; l) / Σ_m μ(m; l))` in box order.
    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn sorted_log_weights(&self) -> &[f64] {
        &self.sorted_log_weights
    }

    pub fn box_count(&self) -> usize {
        self.raw_mass.len()
    }

    pub fn total_mass(&self) -> f64 {
        total(&self.raw_mass)
    }
}

pub fn build_box_measure(series: &PriceSeries, box_size: usize) -> Result<BoxMeasure> {
    measure_from_values(series.values(), box_size)
}

pub(crate) fn measure_from_values(values: &[f64], box_size: usize) -> Result<BoxMeasure> {
    let len = values.len();
    if box_size == 0 || !len.is_multiple_of(box_size) {
        return Err(Error::NonDivisor {
            size: box_size,
            len,
        });
    }
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::InvalidSeries(format!(
            "non-positive value {v} in box measure input"
        )));
    }

    let raw_mass: Vec<f64> = if box_size == 1 {
        values.to_vec()
    } else {
        values
            .chunks_exact(box_size)
            .map(|c| compensated_sum(c.iter().copied()))
            .collect()
    };

    // ln(μ/S) rather than ln μ − ln S: exact under power-of-two rescaling
    let total = total(&raw_mass);
    let log_weights: Vec<f64> = raw_mass.iter().map(|m| (m / total).ln()).collect();
    let mut sorted_log_weights = log_weights.clone();
    sorted_log_weights.sort_unstable_by(f64::total_cmp);

    Ok(BoxMeasure {
        box_size,
        raw_mass,
        log_weights,
        sorted_log_weights,
    })
}

// Summed in ascending order so the total is a function of the multiset alone.
fn total(masses: &[f64]) -> f64 {
    let mut sorted = masses.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    compensated_sum(sorted)
}
