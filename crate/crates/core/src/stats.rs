//! Small numeric helpers shared by the analysis stages: compensated
//! summation and ordinary least squares.

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Result of an ordinary least-squares line fit `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Pearson correlation of the fitted point set, clamped to [-1, 1].
    pub r: f64,
    /// Standard error of the slope; zero when only two points are fitted.
    pub slope_stderr: f64,
    pub max_abs_residual: f64,
}

/// Unweighted OLS of `ys` on `xs`.
///
/// Returns `None` when fewer than two points are given or when every `x`
/// is identical. When `y` has no spread the correlation is reported as
/// `+1` (the sign of a zero slope is taken as positive).
pub fn ols(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    assert_eq!(xs.len(), ys.len(), "ols: length mismatch");
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let x_mean = compensated_sum(xs.iter().copied()) / nf;
    let y_mean = compensated_sum(ys.iter().copied()) / nf;

    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - x_mean;
        let dy = y - y_mean;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= 0.0 {
        return None;
    }

    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;

    let mut ssr = 0.0;
    let mut max_abs_residual = 0.0_f64;
    for (&x, &y) in xs.iter().zip(ys) {
        let e = y - (slope * x + intercept);
        ssr += e * e;
        max_abs_residual = max_abs_residual.max(e.abs());
    }

    let r = if syy == 0.0 || ssr == 0.0 {
        if slope < 0.0 {
            -1.0
        } else {
            1.0
        }
    } else {
        (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
    };

    let slope_stderr = if n > 2 {
        (ssr / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };

    Some(LineFit {
        slope,
        intercept,
        r,
        slope_stderr,
        max_abs_residual,
    })
}
