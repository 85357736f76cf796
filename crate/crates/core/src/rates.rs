//! Least-squares decay rates on log-log data.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    /// `(ln x, ln y)` pairs used in the fit.
    pub pairs: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
}

impl RateFit {
    /// Fitted `y` at `x`.
    pub fn predict(&self, x: f64) -> f64 {
        (self.intercept + self.slope * x.ln()).exp()
    }
}

/// Ordinary least squares of `ln y` against `ln x`.
pub fn fit_rate(xs: &[f64], ys: &[f64]) -> Result<RateFit> {
    if xs.len() != ys.len() {
        return Err(Error::arg("x and y lengths differ"));
    }
    if xs.len() < 3 {
        return Err(Error::arg("a rate fit needs at least 3 pairs"));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::arg("rate fit requires positive finite data"));
    }
    let pairs: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pairs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::arg("rate fit needs at least two distinct x values"));
    }
    let sxy: f64 = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual_rms =
        (pairs.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok(RateFit {
        pairs,
        slope,
        intercept,
        residual_rms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_power_law() {
        let xs = [10.0, 100.0, 1000.0, 1e4];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-2.0)).collect();
        let f = fit_rate(&xs, &ys).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(f.residual_rms < 1e-12);
        assert!((f.predict(50.0) - 3.0 / 2500.0).abs() < 1e-15);
    }

    #[test]
    fn constant_values_have_zero_slope() {
        let f = fit_rate(&[1.0, 2.0, 4.0], &[0.0625; 3]).unwrap();
        assert_eq!(f.slope, 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_rate(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(fit_rate(&[1.0, 2.0, 3.0], &[1.0, 0.0, 2.0]).is_err());
        assert!(fit_rate(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]).is_err());
    }

    proptest! {
        #[test]
        fn slope_is_finite(ys in proptest::collection::vec(1e-12f64..1e3, 3..10)) {
            let xs: Vec<f64> = (1..=ys.len()).map(|i| i as f64).collect();
            let f = fit_rate(&xs, &ys).unwrap();
            prop_assert!(f.slope.is_finite() && f.residual_rms >= 0.0);
        }
    }
}
