//! Hat kernels `h^r(x, u)`: the r-fold convolution of the indicator of
//! `[-u/2, u/2)` with itself, their tensor products, 1-periodizations,
//! Fourier transforms, and the smooth partition-of-unity window `w`.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Univariate hat kernel of order `r` and width parameter `u`.
///
/// Evaluation uses the truncated-power form
/// `h^r(x,u) = 1/(r-1)! * sum_k (-1)^k C(r,k) (x + r u/2 - k u)_+^(r-1)`
/// on the left half of the (symmetric) support, which keeps at most `r/2`
/// terms and avoids cancellation in the tail.
#[derive(Debug, Clone, PartialEq)]
pub struct Hat {
    r: u32,
    u: f64,
    half_support: f64,
    // (-1)^k C(r,k) / (r-1)!
    coeffs: Vec<f64>,
}

impl Hat {
    pub fn new(r: u32, u: f64) -> Result<Self> {
        if r == 0 {
            return Err(Error::arg("hat order r must be at least 1"));
        }
        if !(u > 0.0 && u <= 0.5) {
            return Err(Error::arg(format!("hat width u = {u} outside (0, 1/2]")));
        }
        let fact: f64 = (1..r).map(f64::from).product();
        let mut coeffs = Vec::with_capacity(r as usize + 1);
        let mut binom = 1.0f64;
        for k in 0..=r {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            coeffs.push(sign * binom / fact);
            binom = binom * f64::from(r - k) / f64::from(k + 1);
        }
        Ok(Self {
            r,
            u,
            half_support: f64::from(r) * u / 2.0,
            coeffs,
        })
    }

    pub fn order(&self) -> u32 {
        self.r
    }

    pub fn width(&self) -> f64 {
        self.u
    }

    /// Half-width of the open support `(-r u/2, r u/2)`.
    pub fn half_support(&self) -> f64 {
        self.half_support
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        if self.r == 1 {
            // left-closed [-u/2, u/2)
            let h = 0.5 * self.u;
            return if x >= -h && x < h { 1.0 } else { 0.0 };
        }
        let t = -x.abs();
        if t <= -self.half_support {
            return 0.0;
        }
        let s = t + self.half_support;
        let p = (self.r - 1) as i32;
        let mut acc = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            let y = s - k as f64 * self.u;
            if y <= 0.0 {
                break;
            }
            acc += c * y.powi(p);
        }
        acc
    }

    /// `∫ h^r(x,u) dx = u^r`.
    pub fn integral(&self) -> f64 {
        self.u.powi(self.r as i32)
    }

    /// Fourier transform `∫ h^r(x,u) e^{-2πixy} dx = (sin(πuy)/(πy))^r`.
    #[inline]
    pub fn fourier(&self, y: f64) -> f64 {
        if y == 0.0 {
            return self.integral();
        }
        let py = PI * y;
        ((PI * self.u * y).sin() / py).powi(self.r as i32)
    }

    /// Number of integer shifts `k` on each side summed by [`Hat::eval_periodic`].
    pub fn shift_range(&self) -> i32 {
        (f64::from(self.r) / 4.0).ceil() as i32 + 1
    }

    /// 1-periodization `sum_k h^r(x + k, u)`.
    #[inline]
    pub fn eval_periodic(&self, x: f64) -> f64 {
        let kmax = self.shift_range();
        let mut acc = 0.0;
        for k in -kmax..=kmax {
            acc += self.eval(x + f64::from(k));
        }
        acc
    }
}

/// Checked scalar evaluation of `h^r(x, u)`.
pub fn hat_eval(r: u32, x: f64, u: f64) -> Result<f64> {
    Ok(Hat::new(r, u)?.eval(x))
}

pub fn hat_integral(r: u32, u: f64) -> Result<f64> {
    Ok(Hat::new(r, u)?.integral())
}

pub fn hat_fourier(r: u32, y: f64, u: f64) -> Result<f64> {
    Ok(Hat::new(r, u)?.fourier(y))
}

/// Product of widths `pr(u) = ∏ u_j`.
pub fn pr(u: &[f64]) -> f64 {
    u.iter().product()
}

/// A tensor-product hat `h^r(x, z, u) = ∏_j h^r(x_j - z_j, u_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HatSpec {
    pub r: u32,
    pub z: Vec<f64>,
    pub u: Vec<f64>,
}

impl HatSpec {
    pub fn new(r: u32, z: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        let spec = Self { r, z, u };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.r == 0 {
            return Err(Error::arg("hat order r must be at least 1"));
        }
        if self.z.is_empty() || self.z.len() != self.u.len() {
            return Err(Error::arg(format!(
                "shift has {} coordinates but widths have {}",
                self.z.len(),
                self.u.len()
            )));
        }
        if let Some(z) = self.z.iter().find(|z| !(0.0..1.0).contains(*z)) {
            return Err(Error::arg(format!("shift coordinate {z} outside [0,1)")));
        }
        if let Some(u) = self.u.iter().find(|&&u| !(u > 0.0 && u <= 0.5)) {
            return Err(Error::arg(format!("width {u} outside (0, 1/2]")));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    pub fn pr(&self) -> f64 {
        pr(&self.u)
    }

    /// `∫ h^r(x,z,u) dx = pr(u)^r`, also the integral of the periodization over the unit cube.
    pub fn integral(&self) -> f64 {
        self.u.iter().map(|u| u.powi(self.r as i32)).product()
    }

    pub fn hats(&self) -> Vec<Hat> {
        self.u
            .iter()
            .map(|&u| Hat::new(self.r, u).expect("validated spec"))
            .collect()
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::arg(format!(
                "point has dimension {}, kernel has {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    pub fn tensor_eval(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let hats = self.hats();
        Ok(tensor_product(&hats, &self.z, x, Hat::eval))
    }

    pub fn periodized_eval(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let hats = self.hats();
        Ok(tensor_product(&hats, &self.z, x, Hat::eval_periodic))
    }

    /// Fourier coefficient of the periodized kernel at integer frequency `k`:
    /// `∏_j e^{-2πi k_j z_j} (sin(π k_j u_j)/(π k_j))^r`.
    pub fn fourier_coefficient(&self, k: &[i64]) -> Complex64 {
        let mut c = Complex64::new(1.0, 0.0);
        for ((&kj, &zj), &uj) in k.iter().zip(&self.z).zip(&self.u) {
            let hat = Hat::new(self.r, uj).expect("validated spec");
            c *= phase(-(kj as f64) * zj) * hat.fourier(kj as f64);
        }
        c
    }
}

#[inline]
fn tensor_product(hats: &[Hat], z: &[f64], x: &[f64], f: fn(&Hat, f64) -> f64) -> f64 {
    let mut p = 1.0;
    for ((h, &zj), &xj) in hats.iter().zip(z).zip(x) {
        p *= f(h, xj - zj);
    }
    p
}

/// `e^{2πi t}` with the argument reduced modulo 1 first.
#[inline]
pub fn phase(t: f64) -> Complex64 {
    let f = t - t.round();
    let (s, c) = (2.0 * PI * f).sin_cos();
    Complex64::new(c, s)
}

fn smooth_exp(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth step rising from 0 at `t <= 0` to 1 at `t >= 1`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = smooth_exp(t);
    let b = smooth_exp(1.0 - t);
    a / (a + b)
}

/// Window `w` with support in `(-1/2, 3/2)` and `sum_k w(t + k) = 1`.
pub fn window_eval(t: f64) -> f64 {
    if t <= -0.5 || t >= 1.5 {
        0.0
    } else if t <= 0.5 {
        smooth_step(t + 0.5)
    } else {
        smooth_step(1.5 - t)
    }
}

/// `w(η) = ∏_j w(η_j)`.
pub fn window_weight(eta: &[f64]) -> f64 {
    eta.iter().map(|&t| window_eval(t)).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hat_examples() {
        assert_eq!(hat_eval(1, 0.0, 0.5).unwrap(), 1.0);
        assert_eq!(hat_eval(2, 0.0, 0.5).unwrap(), 0.5);
        assert!((hat_eval(2, 0.1, 0.25).unwrap() - 0.15).abs() < 1e-15);
        assert!((hat_eval(2, 0.2, 0.5).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn indicator_is_left_closed() {
        assert_eq!(hat_eval(1, -0.25, 0.5).unwrap(), 1.0);
        assert_eq!(hat_eval(1, 0.25, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn argument_errors() {
        assert!(hat_eval(0, 0.0, 0.5).is_err());
        assert!(hat_eval(2, 0.0, 0.0).is_err());
        assert!(hat_eval(2, 0.0, 0.6).is_err());
        assert!(HatSpec::new(2, vec![0.5], vec![0.6]).is_err());
        assert!(HatSpec::new(2, vec![0.5, 0.5], vec![0.5]).is_err());
        let spec = HatSpec::new(2, vec![0.5, 0.5], vec![0.5, 0.5]).unwrap();
        assert!(spec.tensor_eval(&[0.5]).is_err());
    }

    #[test]
    fn hat_integral_examples() {
        assert_eq!(hat_integral(1, 0.5).unwrap(), 0.5);
        assert_eq!(hat_integral(3, 0.5).unwrap(), 0.125);
        assert!((hat_integral(2, 0.3).unwrap() - 0.09).abs() < 1e-16);
    }

    #[test]
    fn hat_fourier_examples() {
        assert_eq!(hat_fourier(2, 0.0, 0.5).unwrap(), 0.25);
        let v = hat_fourier(2, 1.0, 0.5).unwrap();
        assert!((v - 1.0 / (PI * PI)).abs() < 1e-15);
        assert!((v - 0.1013212).abs() < 1e-7);
        assert!(hat_fourier(4, 2.0, 0.5).unwrap().abs() < 1e-30);
    }

    #[test]
    fn tensor_examples() {
        let spec = HatSpec::new(2, vec![0.5, 0.5], vec![0.25, 0.5]).unwrap();
        assert!((spec.tensor_eval(&[0.6, 0.7]).unwrap() - 0.045).abs() < 1e-15);
        assert_eq!(spec.tensor_eval(&[0.5, 0.5]).unwrap(), 0.25 * 0.5);
        // |x_1 - z_1| >= r u_1 / 2 = 0.25
        assert_eq!(spec.tensor_eval(&[0.75, 0.5]).unwrap(), 0.0);
        assert_eq!(spec.tensor_eval(&[0.2, 0.5]).unwrap(), 0.0);
    }

    #[test]
    fn periodized_example() {
        let spec = HatSpec::new(2, vec![0.0], vec![0.5]).unwrap();
        let v = spec.periodized_eval(&[0.9]).unwrap();
        assert!((v - 0.4).abs() < 1e-15);
    }

    #[test]
    fn periodized_integral_riemann() {
        let spec = HatSpec::new(2, vec![0.0], vec![0.5]).unwrap();
        let n = 10_000;
        let s: f64 = (0..n)
            .map(|i| spec.periodized_eval(&[(i as f64 + 0.5) / n as f64]).unwrap())
            .sum::<f64>()
            / n as f64;
        assert!((s - 0.25).abs() < 1e-6);
    }

    #[test]
    fn window_examples() {
        assert_eq!(window_eval(0.5), 1.0);
        assert_eq!(window_eval(-0.6), 0.0);
        assert_eq!(window_eval(-0.5), 0.0);
        assert_eq!(window_eval(1.5), 0.0);
        assert!(window_eval(-0.49) > 0.0);
        for i in 0..=1000 {
            let t = -0.5 + i as f64 / 1000.0;
            assert!((window_eval(t) + window_eval(t + 1.0) - 1.0).abs() <= 1e-12);
        }
        assert_eq!(window_weight(&[0.5, 0.5]), 1.0);
    }

    #[test]
    fn shift_range_covers_support() {
        for r in 1..=9 {
            let h = Hat::new(r, 0.5).unwrap();
            // x - z lies in (-1, 1); the farthest shift must clear the support
            assert!(f64::from(h.shift_range()) >= 1.0 + h.half_support());
        }
    }

    proptest! {
        #[test]
        fn hat_is_even(r in 2u32..7, u in 0.01f64..0.5, x in -2.0f64..2.0) {
            let h = Hat::new(r, u).unwrap();
            prop_assert!((h.eval(x) - h.eval(-x)).abs() <= 1e-14);
        }

        #[test]
        fn hat_vanishes_outside_support(r in 1u32..7, u in 0.01f64..0.5, t in 0.0f64..3.0) {
            let h = Hat::new(r, u).unwrap();
            let x = h.half_support() + t;
            prop_assert_eq!(h.eval(x), 0.0);
            prop_assert_eq!(h.eval(-x - 1e-12), 0.0);
        }

        #[test]
        fn periodization_is_one_periodic(
            r in 1u32..6, u in 0.05f64..0.5, z in 0.0f64..1.0, x in 0.0f64..1.0
        ) {
            let h = Hat::new(r, u).unwrap();
            prop_assert!((h.eval_periodic(x - z) - h.eval_periodic(x + 1.0 - z)).abs() <= 1e-12);
        }

        #[test]
        fn fourier_decay_bound(r in 1u32..7, u in 0.01f64..0.5, y in -64.0f64..64.0) {
            let h = Hat::new(r, u).unwrap();
            let bound = u.powi(r as i32).min(y.abs().powi(-(r as i32)));
            prop_assert!(h.fourier(y).abs() <= bound * (1.0 + 1e-12));
        }
    }
}
