//! Synthetic series with known answers: constant and random monofractal
//! controls, and the binomial multiplicative cascade with its closed-form
//! mass exponents.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::ingest::PriceSeries;
use crate::rng::stream_rng;

pub fn constant_series(day_id: &str, len: usize, value: f64) -> Result<PriceSeries> {
    if !(value > 0.0 && value.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "constant value {value} must be positive"
        )));
    }
    PriceSeries::new(day_id, vec![value; len])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RandomKind {
    /// `level · exp(σ Z)`, independent draws.
    IidLognormal { level: f64, sigma: f64 },
    /// `I(t) = I(0) · exp(Σ_{s ≤ t} σ Z_s)`, a geometric random walk.
    IntradayWalk { start: f64, step_sigma: f64 },
}

impl RandomKind {
    fn validate(&self) -> Result<()> {
        let (a, b, what) = match *self {
            RandomKind::IidLognormal { level, sigma } => (level, sigma, "iid-lognormal"),
            RandomKind::IntradayWalk { start, step_sigma } => (start, step_sigma, "intraday-walk"),
        };
        if !(a > 0.0 && a.is_finite() && b >= 0.0 && b.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "{what}: level must be positive and sigma non-negative, got ({a}, {b})"
            )));
        }
        Ok(())
    }
}

pub fn random_positive_series(
    day_id: &str,
    len: usize,
    kind: RandomKind,
    seed: u64,
) -> Result<PriceSeries> {
    kind.validate()?;
    let mut rng = stream_rng(seed, 0);
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut draw_positive = |f: &dyn Fn(f64) -> f64| loop {
        let v = f(std_normal.sample(&mut rng));
        if v > 0.0 && v.is_finite() {
            return v;
        }
    };
    let values = match kind {
        RandomKind::IidLognormal { level, sigma } => (0..len)
            .map(|_| draw_positive(&|z| level * (sigma * z).exp()))
            .collect(),
        RandomKind::IntradayWalk { start, step_sigma } => {
            let mut level = start;
            let mut out = Vec::with_capacity(len);
            for _ in 0..len {
                out.push(level);
                level = draw_positive(&|z| level * (step_sigma * z).exp());
            }
            out
        }
    };
    PriceSeries::new(day_id, values)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeSpec {
    /// Fraction of a parent's mass given to one child.
    pub p: f64,
    /// Number of splits; the series has `2^levels` points.
    pub levels: u32,
    pub total_mass: f64,
}

impl CascadeSpec {
    pub fn new(p: f64, levels: u32, total_mass: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "cascade p = {p} not in (0, 1)"
            )));
        }
        if levels == 0 || levels > 30 {
            return Err(Error::InvalidParameter(format!(
                "cascade levels = {levels} not in 1..=30"
            )));
        }
        if !(total_mass > 0.0 && total_mass.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "cascade mass {total_mass} must be positive"
            )));
        }
        Ok(CascadeSpec {
            p,
            levels,
            total_mass,
        })
    }

    /// Number of leaves, `2^levels`.
    pub fn leaf_count(&self) -> usize {
        1 << self.levels
    }
}

/// Leaf masses of a binomial cascade. Without a seed the left child always
/// receives `p`; with one, each node flips its orientation at random.
pub fn binomial_cascade(
    day_id: &str,
    spec: &CascadeSpec,
    seed: Option<u64>,
) -> Result<PriceSeries> {
    let spec = CascadeSpec::new(spec.p, spec.levels, spec.total_mass)?;
    let mut rng = seed.map(|s| stream_rng(s, 0));
    let mut masses = vec![spec.total_mass];
    for _ in 0..spec.levels {
        let mut next = Vec::with_capacity(masses.len() * 2);
        for &m in &masses {
            let flip = rng.as_mut().is_some_and(|r| r.random_bool(0.5));
            let left = if flip { 1.0 - spec.p } else { spec.p };
            next.push(m * left);
            next.push(m * (1.0 - left));
        }
        masses = next;
    }
    PriceSeries::new(day_id, masses)
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("p = {p} not in (0, 1)")))
    }
}

/// `τ(q) = −log₂(p^q + (1−p)^q)`.
pub fn analytic_binomial_tau(p: f64, q: f64) -> Result<f64> {
    check_p(p)?;
    // log-sum-exp of q ln p and q ln(1-p)
    let (a, b) = (q * p.ln(), q * (1.0 - p).ln());
    let m = a.max(b);
    let lse = m + ((a - m).exp() + (b - m).exp()).ln();
    Ok(-lse / std::f64::consts::LN_2)
}

/// `α(q) = dτ/dq = −[p^q ln p + (1−p)^q ln(1−p)] / [(p^q + (1−p)^q) ln 2]`.
pub fn analytic_binomial_alpha(p: f64, q: f64) -> Result<f64> {
    check_p(p)?;
    let (lp, lr) = (p.ln(), (1.0 - p).ln());
    // weight of the p branch: p^q / (p^q + (1-p)^q)
    let w = 1.0 / (1.0 + (q * (lr - lp)).exp());
    Ok(-(w * lp + (1.0 - w) * lr) / std::f64::consts::LN_2)
}

/// `f(α(q)) = q α(q) − τ(q)`.
pub fn analytic_binomial_f(p: f64, q: f64) -> Result<f64> {
    Ok(q * analytic_binomial_alpha(p, q)? - analytic_binomial_tau(p, q)?)
}

/// Spectrum width as `q → ±∞`: `|log₂(p / (1−p))|`.
pub fn analytic_binomial_width(p: f64) -> Result<f64> {
    check_p(p)?;
    Ok((p / (1.0 - p)).log2().abs())
}
