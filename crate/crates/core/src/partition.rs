//! Log partition function `ln χ_q(l) = ln Σ_n u_n^q` over a (q, l) grid,
//! evaluated with a max-shift so that |q| in the hundreds stays finite.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{BoxScheme, PriceSeries};
use crate::measure::{measure_from_values, BoxMeasure};

/// Strictly increasing moment orders; always contains 0 and 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct MomentGrid {
    q: Vec<f64>,
}

impl MomentGrid {
    pub fn new(q: Vec<f64>) -> Result<Self> {
        if q.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("non-finite moment order".into()));
        }
        if q.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid(
                "moment orders must be strictly increasing".into(),
            ));
        }
        for required in [0.0, 1.0] {
            if !q.contains(&required) {
                return Err(Error::InvalidGrid(format!(
                    "grid must contain q = {required}"
                )));
            }
        }
        Ok(MomentGrid { q })
    }

    /// `q_min, q_min + step, …` up to `q_max` (inclusive, with a small
    /// tolerance). Points within 1e-9 of an integer are snapped to it.
    pub fn range(q_min: f64, q_max: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidGrid(format!("step {step} must be positive")));
        }
        if !(q_min < 0.0 && q_max > 1.0) {
            return Err(Error::InvalidGrid(format!(
                "need q_min < 0 < 1 < q_max, got [{q_min}, {q_max}]"
            )));
        }
        let count = ((q_max - q_min) / step + 1e-9).floor() as usize + 1;
        let q = (0..count)
            .map(|i| {
                let v = q_min + i as f64 * step;
                let r = v.round();
                if (v - r).abs() < 1e-9 {
                    r
                } else {
                    v
                }
            })
            .collect();
        MomentGrid::new(q)
    }

    /// Integer orders −120..=120.
    pub fn standard() -> Self {
        MomentGrid::range(-120.0, 120.0, 1.0).expect("standard grid is valid")
    }

    pub fn values(&self) -> &[f64] {
        &self.q
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn index_of(&self, q: f64) -> Option<usize> {
        self.q.iter().position(|&v| v == q)
    }

    fn integer_orders(&self) -> Option<Vec<i64>> {
        self.q
            .iter()
            .map(|&v| (v.fract() == 0.0 && v.abs() <= 1e6).then_some(v as i64))
            .collect()
    }
}

/// `ln Σ_n u_n^q` for one measure, computed as
/// `s* + ln Σ_n exp(q ln u_n − s*)` with `s* = max_n q ln u_n`.
pub fn log_partition_value(measure: &BoxMeasure, q: f64) -> f64 {
    let lw = measure.sorted_log_weights();
    let shift = if q >= 0.0 {
        q * lw[lw.len() - 1]
    } else {
        q * lw[0]
    };
    let sum: f64 = lw.iter().map(|&w| (q * w - shift).exp()).sum();
    shift + sum.ln()
}

/// How the cells of a surface column are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MomentMethod {
    /// One `exp` per box and per q.
    Direct,
    /// For all-integer grids, powers of the max-normalized weights are built
    /// by repeated multiplication (one `exp` per box per column). Falls back
    /// to `Direct` otherwise.
    #[default]
    Auto,
}

/// `ln χ_q(l)` for every q of the grid, for one measure.
pub fn log_partition_column(
    measure: &BoxMeasure,
    grid: &MomentGrid,
    method: MomentMethod,
) -> Vec<f64> {
    let orders = match method {
        MomentMethod::Auto => grid.integer_orders(),
        MomentMethod::Direct => None,
    };
    match orders {
        Some(orders) => integer_column(measure.sorted_log_weights(), &orders),
        None => grid
            .values()
            .iter()
            .map(|&q| log_partition_value(measure, q))
            .collect(),
    }
}

// Smaller than any term that can matter next to the unit max term; flushing
// keeps products out of the subnormal range.
const FLUSH: f64 = 1e-300;

fn integer_column(sorted_lw: &[f64], orders: &[i64]) -> Vec<f64> {
    let n = sorted_lw.len();
    let lw_min = sorted_lw[0];
    let lw_max = sorted_lw[n - 1];
    let mut out = vec![0.0; orders.len()];

    let first_pos = orders.partition_point(|&k| k < 0);
    if let Some(&k) = orders.get(first_pos).filter(|&&k| k == 0) {
        debug_assert_eq!(k, 0);
        out[first_pos] = (n as f64).ln();
    }

    // q > 0: Σ (u_n / u_max)^k, ascending k.
    let positive = &orders[first_pos..];
    if let Some(&k_max) = positive.last().filter(|&&k| k > 0) {
        let base: Vec<f64> = sorted_lw.iter().map(|&w| (w - lw_max).exp()).collect();
        let mut pow = base.clone();
        let mut slot = first_pos + positive.partition_point(|&k| k <= 0);
        for k in 1..=k_max {
            if k > 1 {
                for (p, b) in pow.iter_mut().zip(&base) {
                    let v = *p * b;
                    *p = if v < FLUSH { 0.0 } else { v };
                }
            }
            if orders[slot] == k {
                let s: f64 = pow.iter().sum();
                out[slot] = k as f64 * lw_max + s.ln();
                slot += 1;
            }
        }
    }

    // q < 0: Σ (u_min / u_n)^|k|, walking from -1 downwards.
    let negative = &orders[..first_pos];
    if let Some(&k_min) = negative.first() {
        let base: Vec<f64> = sorted_lw.iter().map(|&w| (lw_min - w).exp()).collect();
        let mut pow = base.clone();
        let mut slot = first_pos;
        for k in 1..=(-k_min) {
            if k > 1 {
                for (p, b) in pow.iter_mut().zip(&base) {
                    let v = *p * b;
                    *p = if v < FLUSH { 0.0 } else { v };
                }
            }
            if slot > 0 && orders[slot - 1] == -k {
                slot -= 1;
                let s: f64 = pow.iter().sum();
                out[slot] = -(k as f64) * lw_min + s.ln();
            }
        }
    }
    out
}

/// `ln χ_q(l)` over the (q, l) grid. Rows follow the grid, columns the scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionSurface {
    grid: MomentGrid,
    scheme: BoxScheme,
    // row-major, grid.len() x scheme.sizes().len()
    log_chi: Vec<f64>,
}

impl PartitionSurface {
    pub fn grid(&self) -> &MomentGrid {
        &self.grid
    }

    pub fn scheme(&self) -> &BoxScheme {
        &self.scheme
    }

    pub fn get(&self, q_index: usize, l_index: usize) -> f64 {
        self.log_chi[q_index * self.scheme.sizes().len() + l_index]
    }

    /// `ln χ_q(l)` for all box sizes at one moment order.
    pub fn row(&self, q_index: usize) -> &[f64] {
        let w = self.scheme.sizes().len();
        &self.log_chi[q_index * w..(q_index + 1) * w]
    }

    pub fn column(&self, l_index: usize) -> Vec<f64> {
        (0..self.grid.len())
            .map(|qi| self.get(qi, l_index))
            .collect()
    }
}

pub fn partition_surface(
    series: &PriceSeries,
    scheme: &BoxScheme,
    grid: &MomentGrid,
) -> Result<PartitionSurface> {
    surface_from_values(series.values(), scheme, grid, MomentMethod::Auto)
}

pub fn partition_surface_with(
    series: &PriceSeries,
    scheme: &BoxScheme,
    grid: &MomentGrid,
    method: MomentMethod,
) -> Result<PartitionSurface> {
    surface_from_values(series.values(), scheme, grid, method)
}

pub(crate) fn surface_from_values(
    values: &[f64],
    scheme: &BoxScheme,
    grid: &MomentGrid,
    method: MomentMethod,
) -> Result<PartitionSurface> {
    if values.len() != scheme.series_length() {
        return Err(Error::InvalidScheme(format!(
            "scheme built for length {}, series has {}",
            scheme.series_length(),
            values.len()
        )));
    }
    let width = scheme.sizes().len();
    let mut log_chi = vec![0.0; grid.len() * width];
    for (li, &l) in scheme.sizes().iter().enumerate() {
        let measure = measure_from_values(values, l)?;
        let column = log_partition_column(&measure, grid, method);
        for (qi, v) in column.into_iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Numeric(format!(
                    "ln chi not finite at q = {}, l = {l}",
                    grid.values()[qi]
                )));
            }
            log_chi[qi * width + li] = v;
        }
    }
    Ok(PartitionSurface {
        grid: grid.clone(),
        scheme: scheme.clone(),
        log_chi,
    })
}
