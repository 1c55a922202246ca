//! Least-squares power-law fits on log–log data.

use serde::{Deserialize, Serialize};

use crate::error::{AcnsError, Result};

pub const MIN_FIT_POINTS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub abscissae: Vec<f64>,
    pub ordinates: Vec<f64>,
    pub fitted_slope: f64,
    /// Natural-log intercept: `log y ≈ intercept + slope·log x`.
    pub fitted_intercept: f64,
    pub r_squared: f64,
    /// Standard error of the slope estimate.
    pub slope_stderr: f64,
}

impl RateFit {
    pub fn predict(&self, x: f64) -> f64 {
        (self.fitted_intercept + self.fitted_slope * x.ln()).exp()
    }
}

/// Ordinary least squares on `(ln x, ln y)`. Requires at least four positive
/// points whose abscissae span a decade.
pub fn fit_rate(xs: &[f64], ys: &[f64]) -> Result<RateFit> {
    if xs.len() != ys.len() {
        return Err(AcnsError::Fit(format!("{} abscissae but {} ordinates", xs.len(), ys.len())));
    }
    if xs.len() < MIN_FIT_POINTS {
        return Err(AcnsError::InsufficientSamples {
            needed: MIN_FIT_POINTS,
            got: xs.len(),
        });
    }
    if let Some((x, y)) = xs.iter().zip(ys).find(|(x, y)| !(**x > 0.0 && **y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(AcnsError::Fit(format!("non-positive point ({x}, {y})")));
    }
    let (lo, hi) = xs.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    if hi / lo < 10.0 * (1.0 - 1e-9) {
        return Err(AcnsError::Fit(format!("abscissae span {lo}..{hi}, less than a decade")));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    let slope_stderr = (sse / (n - 2.0) / sxx).sqrt();
    Ok(RateFit {
        abscissae: xs.to_vec(),
        ordinates: ys.to_vec(),
        fitted_slope: slope,
        fitted_intercept: intercept,
        r_squared,
        slope_stderr,
    })
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}
