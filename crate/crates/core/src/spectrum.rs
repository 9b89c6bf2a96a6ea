//! Singularity spectrum by Legendre transform of `τ(q)`, and the two scalar
//! diagnostics used by the shuffle test: the width `Δα` and the mean end
//! height `F = [f(α_min) + f(α_max)] / 2`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::partition::MomentGrid;
use crate::scaling::MassExponents;

#[derive(Debug, Clone, PartialEq)]
pub struct SingularitySpectrum {
    pub grid: MomentGrid,
    pub alpha: Vec<f64>,
    pub f: Vec<f64>,
    pub delta_alpha: f64,
    pub big_f: f64,
    /// Grid index where `α` is smallest (ties: largest q).
    pub alpha_min_index: usize,
    /// Grid index where `α` is largest (ties: smallest q).
    pub alpha_max_index: usize,
}

impl SingularitySpectrum {
    pub fn stats(&self) -> SpectrumStats {
        spectrum_stats(self)
    }

    /// Largest increase of `α` between neighbouring q; zero when `α(q)` is
    /// non-increasing, as it is for a concave `τ`.
    pub fn max_alpha_increase(&self) -> f64 {
        self.alpha
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumStats {
    pub delta_alpha: f64,
    #[serde(rename = "F")]
    pub big_f: f64,
}

pub fn spectrum_stats(spec: &SingularitySpectrum) -> SpectrumStats {
    SpectrumStats {
        delta_alpha: spec.delta_alpha,
        big_f: spec.big_f,
    }
}

/// `α = dτ/dq` by second-order finite differences (central inside, one-sided
/// three-point stencils at the ends, all valid on non-uniform grids), then
/// `f = qα − τ`.
pub fn legendre_spectrum(me: &MassExponents) -> Result<SingularitySpectrum> {
    let q = me.grid.values();
    let tau = &me.tau;
    let n = q.len();
    if n < 3 {
        return Err(Error::InvalidGrid(format!(
            "need at least 3 moment orders for a spectrum, got {n}"
        )));
    }

    let alpha = derivative(q, tau);
    let f: Vec<f64> = q
        .iter()
        .zip(&alpha)
        .zip(tau)
        .map(|((&q, &a), &t)| q * a - t)
        .collect();

    let mut i_min = 0;
    let mut i_max = 0;
    for i in 1..n {
        if alpha[i] <= alpha[i_min] {
            i_min = i;
        }
        if alpha[i] > alpha[i_max] {
            i_max = i;
        }
    }
    if alpha.iter().chain(&f).any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite spectrum value".into()));
    }

    Ok(SingularitySpectrum {
        grid: me.grid.clone(),
        delta_alpha: alpha[i_max] - alpha[i_min],
        big_f: (f[i_min] + f[i_max]) / 2.0,
        alpha_min_index: i_min,
        alpha_max_index: i_max,
        alpha,
        f,
    })
}

fn derivative(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut d = vec![0.0; n];

    let (h1, h2) = (x[1] - x[0], x[2] - x[1]);
    d[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * y[0] + (h1 + h2) / (h1 * h2) * y[1]
        - h1 / (h2 * (h1 + h2)) * y[2];

    for i in 1..n - 1 {
        let (h1, h2) = (x[i] - x[i - 1], x[i + 1] - x[i]);
        d[i] = -h2 / (h1 * (h1 + h2)) * y[i - 1]
            + (h2 - h1) / (h1 * h2) * y[i]
            + h1 / (h2 * (h1 + h2)) * y[i + 1];
    }

    let (h1, h2) = (x[n - 2] - x[n - 3], x[n - 1] - x[n - 2]);
    d[n - 1] = h2 / (h1 * (h1 + h2)) * y[n - 3] - (h1 + h2) / (h1 * h2) * y[n - 2]
        + (h1 + 2.0 * h2) / (h2 * (h1 + h2)) * y[n - 1];
    d
}
