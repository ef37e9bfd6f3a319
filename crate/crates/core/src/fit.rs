//! Least-squares exponent fits for log-log and semi-log scaling laws.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{ConeError, Result};

/// Straight-line fit `y = intercept + exponent * x` with a 95% band on the slope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub exponent: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub points: usize,
    pub x_min: f64,
    pub x_max: f64,
}

impl ScalingFit {
    pub fn within(&self, target: f64, tol: f64) -> bool {
        (self.exponent - target).abs() <= tol
    }
}

/// Ordinary least squares on raw `(x, y)` pairs.
pub fn linear_fit(xs: &[f64], ys: &[f64], min_points: usize) -> Result<ScalingFit> {
    if xs.len() != ys.len() {
        return Err(ConeError::param("ys", "length differs from xs"));
    }
    let needed = min_points.max(2);
    if xs.len() < needed {
        return Err(ConeError::TooFewPoints { needed, got: xs.len() });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(ConeError::NonFinite("regression data".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(ConeError::param("xs", "all abscissae coincide"));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let (stderr, half) = if xs.len() > 2 {
        let ssr: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
        let dof = n - 2.0;
        let se = (ssr / dof / sxx).sqrt();
        let t = StudentsT::new(0.0, 1.0, dof).map(|d| d.inverse_cdf(0.975)).unwrap_or(1.96);
        (se, t * se)
    } else {
        (f64::NAN, f64::NAN)
    };
    let x_min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let x_max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(ScalingFit {
        exponent: slope,
        intercept,
        stderr,
        ci_low: slope - half,
        ci_high: slope + half,
        points: xs.len(),
        x_min,
        x_max,
    })
}

/// Fits `|y| ~ C x^p` by regressing `log|y|` on `log x`.
pub fn power_law_fit(xs: &[f64], ys: &[f64], min_points: usize) -> Result<ScalingFit> {
    if xs.iter().any(|&x| x <= 0.0) {
        return Err(ConeError::param("xs", "power-law abscissae must be positive"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly = log_abs(ys)?;
    linear_fit(&lx, &ly, min_points)
}

/// Fits `|y| ~ C e^{p x}` by regressing `log|y|` on `x`.
pub fn exponential_fit(xs: &[f64], ys: &[f64], min_points: usize) -> Result<ScalingFit> {
    let ly = log_abs(ys)?;
    linear_fit(xs, &ly, min_points)
}

fn log_abs(ys: &[f64]) -> Result<Vec<f64>> {
    ys.iter()
        .map(|&y| {
            if y == 0.0 {
                Err(ConeError::Domain("zero remainder in a logarithmic fit".into()))
            } else {
                Ok(y.abs().ln())
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power() {
        let xs: Vec<f64> = (1..=10).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(1.5)).collect();
        let fit = power_law_fit(&xs, &ys, 8).unwrap();
        assert!((fit.exponent - 1.5).abs() < 1e-12);
        assert!((fit.intercept - 3.0_f64.ln()).abs() < 1e-12);
        assert!(fit.ci_high - fit.ci_low < 1e-10);
    }

    #[test]
    fn exponential_and_sign_insensitive() {
        let xs: Vec<f64> = (0..12).map(|i| -10.0 + i as f64 * 0.5).collect();
        let ys: Vec<f64> = xs.iter().map(|x| -0.25 * (2.0 * x).exp()).collect();
        let fit = exponential_fit(&xs, &ys, 8).unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-12);
    }

    #[test]
    fn short_grid_rejected() {
        let err = power_law_fit(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], 8).unwrap_err();
        assert_eq!(err, ConeError::TooFewPoints { needed: 8, got: 3 });
    }
}
