//! Wilson intervals, medians and least-squares slopes.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Two-sided normal quantile for a confidence level in `(0, 1)`.
pub fn z_for_level(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::invalid(format!("confidence level {level} outside (0, 1)")));
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(normal.inverse_cdf(1.0 - (1.0 - level) / 2.0))
}

/// Wilson score interval for `successes` out of `trials`. Returns
/// `(low, high)`; `(0, 1)` when there are no trials.
pub fn wilson(successes: u64, trials: u64, level: f64) -> Result<(f64, f64)> {
    if successes > trials {
        return Err(Error::invalid("more successes than trials"));
    }
    let z = z_for_level(level)?;
    if trials == 0 {
        return Ok((0.0, 1.0));
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // Round-off can push the bounds past p at the extremes.
    Ok(((center - half).clamp(0.0, p), (center + half).clamp(p, 1.0)))
}

/// Median of a non-empty sample (mean of the middle pair for even sizes).
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[mid] } else { (v[mid - 1] + v[mid]) / 2.0 })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; absent with fewer than three points.
    pub slope_se: Option<f64>,
}

/// Ordinary least squares `y ≈ intercept + slope · x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::invalid("x and y differ in length"));
    }
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if x.len() < 2 || sxx <= 0.0 {
        return Err(Error::invalid("need at least two distinct x values"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_se = (x.len() > 2).then(|| {
        let sse: f64 = x
            .iter()
            .zip(y)
            .map(|(a, b)| (b - intercept - slope * a).powi(2))
            .sum();
        (sse / (k - 2.0) / sxx).sqrt()
    });
    Ok(LinearFit { slope, intercept, slope_se })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn quantiles() {
        assert_relative_eq!(z_for_level(0.95).unwrap(), 1.959964, epsilon = 1e-5);
        assert_relative_eq!(z_for_level(0.99).unwrap(), 2.575829, epsilon = 1e-5);
        assert!(z_for_level(1.0).is_err());
    }

    #[test]
    fn wilson_reference_values() {
        // 81 of 263 at 95%: textbook example, interval (0.2553, 0.3662).
        let (lo, hi) = wilson(81, 263, 0.95).unwrap();
        assert_relative_eq!(lo, 0.2553, epsilon = 1e-4);
        assert_relative_eq!(hi, 0.3662, epsilon = 1e-4);
        let (lo, hi) = wilson(10, 10, 0.95).unwrap();
        assert!(lo > 0.69 && lo < 0.73 && hi == 1.0);
        let (lo, hi) = wilson(0, 10, 0.95).unwrap();
        assert!(lo == 0.0 && hi < 0.31);
        assert!(wilson(3, 2, 0.95).is_err());
    }

    #[test]
    fn fits_and_medians() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [3.0, 5.0, 7.0, 9.0];
        let f = linear_fit(&x, &y).unwrap();
        assert_relative_eq!(f.slope, 2.0);
        assert_relative_eq!(f.intercept, 1.0);
        assert_relative_eq!(f.slope_se.unwrap(), 0.0);
        assert!(linear_fit(&[1.0, 1.0], &[0.0, 1.0]).is_err());
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }
}
