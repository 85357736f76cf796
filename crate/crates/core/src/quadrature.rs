//! Cubature application, quadrature errors of periodized hat kernels in
//! space and frequency, exponential sums `Λ(k)`, the weighted energy
//! `Σ_{k≠0} |Λ(k)|² ν(k̄)^{-r}`, and the dyadic sums `σ^r(n, u)`.

use crate::error::{check_cap, Error, Result};
use crate::io::fmt17;
use crate::kernels::{phase, Hat, HatSpec};
use crate::pointsets::WeightedPointSet;
use crate::sum::NeumaierSum;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;

/// Work caps for frequency-domain computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierLimits {
    /// Maximum `m (2K+1)^d` for one exponential-sum table.
    pub max_work: f64,
}

impl Default for FourierLimits {
    fn default() -> Self {
        Self { max_work: 2e9 }
    }
}

/// `Σ_μ λ_μ f(ξ^μ)` with compensated summation.
pub fn apply_cubature<F>(ps: &WeightedPointSet, f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut acc = NeumaierSum::new();
    for (i, (p, &w)) in ps.points().zip(ps.weights()).enumerate() {
        let v = f(p);
        if !v.is_finite() {
            return Err(Error::NonFinite { index: i });
        }
        acc.add(w * v);
    }
    Ok(acc.value())
}

/// `Σ_μ λ_μ h̃^r(ξ^μ, z, u) - pr(u)^r`.
pub fn quadrature_error_spatial(ps: &WeightedPointSet, spec: &HatSpec) -> Result<f64> {
    spec.validate()?;
    check_dims(ps, spec)?;
    let hats = spec.hats();
    let value = apply_cubature(ps, |x| {
        let mut p = 1.0;
        for ((h, &zj), &xj) in hats.iter().zip(&spec.z).zip(x) {
            p *= h.eval_periodic(xj - zj);
        }
        p
    })?;
    Ok(value - spec.integral())
}

fn check_dims(ps: &WeightedPointSet, spec: &HatSpec) -> Result<()> {
    if ps.dim() != spec.dim() {
        return Err(Error::arg(format!(
            "point set dimension {} does not match kernel dimension {}",
            ps.dim(),
            spec.dim()
        )));
    }
    Ok(())
}

/// Frequency-side quadrature error with a certified truncation bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourierError {
    /// Real part of the truncated series plus the `(Λ(0) - 1) pr(u)^r` term.
    pub value: f64,
    /// Imaginary part of the truncated series (zero up to rounding for real weights).
    pub imag: f64,
    /// Upper bound on the modulus of the omitted terms `‖k‖_∞ > K`.
    pub tail_bound: f64,
}

/// Table of `Λ(k) = Σ_μ λ_μ e^{2πi(k, ξ^μ)}` for `‖k‖_∞ <= K`.
#[derive(Debug, Clone)]
pub struct ExponentialSumTable {
    d: usize,
    cutoff: i64,
    values: Vec<Complex64>,
    m: usize,
    weight_mass: f64,
    weight_sum: f64,
}

impl ExponentialSumTable {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn point_count(&self) -> usize {
        self.m
    }

    pub fn weight_mass(&self) -> f64 {
        self.weight_mass
    }

    pub fn weight_sum(&self) -> f64 {
        self.weight_sum
    }

    fn side(&self) -> usize {
        (2 * self.cutoff + 1) as usize
    }

    /// Flat index of `k`, or `None` outside the cube.
    pub fn index(&self, k: &[i64]) -> Option<usize> {
        if k.len() != self.d || k.iter().any(|c| c.abs() > self.cutoff) {
            return None;
        }
        let side = self.side();
        Some(
            k.iter()
                .fold(0usize, |acc, &c| acc * side + (c + self.cutoff) as usize),
        )
    }

    pub fn frequency(&self, idx: usize) -> Vec<i64> {
        let side = self.side();
        let mut k = vec![0i64; self.d];
        let mut rest = idx;
        for j in (0..self.d).rev() {
            k[j] = (rest % side) as i64 - self.cutoff;
            rest /= side;
        }
        k
    }

    pub fn get(&self, k: &[i64]) -> Option<Complex64> {
        self.index(k).map(|i| self.values[i])
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<i64>, Complex64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| (self.frequency(i), v))
    }

    /// Quadrature error of the periodized kernel from this table (needs `r >= 2`).
    pub fn error_for(&self, spec: &HatSpec) -> Result<FourierError> {
        spec.validate()?;
        if spec.dim() != self.d {
            return Err(Error::arg("kernel dimension does not match table"));
        }
        if spec.r < 2 {
            return Err(Error::arg(
                "the Fourier series of h^1 is not absolutely convergent; use the spatial error",
            ));
        }
        let k_cut = self.cutoff;
        let side = self.side();
        let hats = spec.hats();
        // per-coordinate Fourier factors e^{-2πi k z_j} ĥ(k, u_j)
        let factors: Vec<Vec<Complex64>> = hats
            .iter()
            .zip(&spec.z)
            .map(|(h, &zj)| {
                (-k_cut..=k_cut)
                    .map(|k| phase(-(k as f64) * zj) * h.fourier(k as f64))
                    .collect()
            })
            .collect();
        let zero = self.index(&vec![0; self.d]).expect("origin in table");
        let mut re = NeumaierSum::new();
        let mut im = NeumaierSum::new();
        let mut digits = vec![0usize; self.d];
        for (idx, lam) in self.values.iter().enumerate() {
            if idx != zero {
                let mut rest = idx;
                for j in (0..self.d).rev() {
                    digits[j] = rest % side;
                    rest /= side;
                }
                let mut c = Complex64::new(1.0, 0.0);
                for (f, &dj) in factors.iter().zip(&digits) {
                    c *= f[dj];
                }
                let t = lam * c;
                re.add(t.re);
                im.add(t.im);
            }
        }
        let integral = spec.integral();
        let value = re.value() + (self.values[zero].re - 1.0) * integral;
        let tail = hat_tail_bound(&hats, k_cut) * self.weight_mass;
        Ok(FourierError {
            value,
            imag: im.value(),
            tail_bound: tail,
        })
    }

    /// CSV with header `k1,...,kd,re,im`.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for j in 1..=self.d {
            let _ = write!(s, "k{j},");
        }
        s.push_str("re,im\n");
        for (k, v) in self.iter() {
            for c in k {
                let _ = write!(s, "{c},");
            }
            let _ = writeln!(s, "{},{}", fmt17(v.re), fmt17(v.im));
        }
        s
    }
}

/// `Σ_{‖k‖_∞>K} ∏_j min(u_j^r, |k_j|^{-r})`, bounded in closed form.
fn hat_tail_bound(hats: &[Hat], k_cut: i64) -> f64 {
    let mut inner = 1.0;
    let mut full = 1.0;
    for h in hats {
        let r = h.order() as i32;
        let ur = h.integral();
        let term = |k: i64| ur.min((k as f64).powi(-r));
        let s_k: f64 = ur + 2.0 * (1..=k_cut).map(term).sum::<f64>();
        // explicit terms until |k|^{-r} <= u^r, then the integral bound
        let k_switch = ((1.0 / h.width()).ceil() as i64).max(k_cut);
        let mid: f64 = 2.0 * (k_cut + 1..=k_switch).map(term).sum::<f64>();
        let far = 2.0 * (k_switch as f64).powi(1 - r) / f64::from(r - 1);
        inner *= s_k;
        full *= s_k + mid + far;
    }
    (full - inner).max(0.0)
}

/// `Σ_{k≠0, ‖k‖_∞<=K} Λ(k) ĥ(k)` plus the `Λ(0)` correction and its tail bound.
pub fn quadrature_error_fourier(
    ps: &WeightedPointSet,
    spec: &HatSpec,
    cutoff: i64,
    limits: &FourierLimits,
) -> Result<FourierError> {
    check_dims(ps, spec)?;
    if spec.r < 2 {
        return Err(Error::arg(
            "the Fourier series of h^1 is not absolutely convergent; use the spatial error",
        ));
    }
    exponential_sums(ps, cutoff, limits)?.error_for(spec)
}

/// Builds `Λ(k)` for every `‖k‖_∞ <= K`. Each phase is evaluated directly per
/// node and frequency; frequencies are processed in parallel.
pub fn exponential_sums(
    ps: &WeightedPointSet,
    cutoff: i64,
    limits: &FourierLimits,
) -> Result<ExponentialSumTable> {
    if cutoff < 1 {
        return Err(Error::arg("frequency cutoff K must be at least 1"));
    }
    let d = ps.dim();
    let side = (2 * cutoff + 1) as usize;
    let count = (side as f64).powi(d as i32);
    check_cap("exponential sum table", count * ps.len() as f64, limits.max_work)?;

    // phases[j][μ * side + (k + K)] = e^{2πi k ξ^μ_j}
    let m = ps.len();
    let phases: Vec<Vec<Complex64>> = (0..d)
        .map(|j| {
            let mut v = Vec::with_capacity(m * side);
            for p in ps.points() {
                for k in -cutoff..=cutoff {
                    v.push(phase(k as f64 * p[j]));
                }
            }
            v
        })
        .collect();
    let weights = ps.weights();
    let values: Vec<Complex64> = (0..count as usize)
        .into_par_iter()
        .map(|idx| {
            let mut digits = vec![0usize; d];
            let mut rest = idx;
            for j in (0..d).rev() {
                digits[j] = rest % side;
                rest /= side;
            }
            let mut re = NeumaierSum::new();
            let mut im = NeumaierSum::new();
            for (mu, &w) in weights.iter().enumerate() {
                let mut e = Complex64::new(w, 0.0);
                for (ph, &dj) in phases.iter().zip(&digits) {
                    e *= ph[mu * side + dj];
                }
                re.add(e.re);
                im.add(e.im);
            }
            Complex64::new(re.value(), im.value())
        })
        .collect();
    Ok(ExponentialSumTable {
        d,
        cutoff,
        values,
        m,
        weight_mass: ps.weight_mass(),
        weight_sum: ps.weight_sum(),
    })
}

/// `Λ*(k) = |Λ(k)|²`, laid out like the source table.
#[derive(Debug, Clone)]
pub struct PowerTable {
    pub cutoff: i64,
    pub d: usize,
    pub values: Vec<f64>,
}

impl PowerTable {
    pub fn get(&self, k: &[i64]) -> Option<f64> {
        if k.len() != self.d || k.iter().any(|c| c.abs() > self.cutoff) {
            return None;
        }
        let side = (2 * self.cutoff + 1) as usize;
        let idx = k
            .iter()
            .fold(0usize, |acc, &c| acc * side + (c + self.cutoff) as usize);
        Some(self.values[idx])
    }
}

pub fn lambda_star(table: &ExponentialSumTable) -> PowerTable {
    PowerTable {
        cutoff: table.cutoff,
        d: table.d,
        values: table.values.iter().map(|v| v.norm_sqr()).collect(),
    }
}

/// Truncated weighted energy and its tail bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyValue {
    pub value: f64,
    pub tail_bound: f64,
}

/// `Σ_{0<‖k‖_∞<=K} |Λ(k)|² ν(k̄)^{-r}` with `ν(k̄) = ∏_j max(|k_j|, 1)`.
pub fn lower_bound_functional(table: &ExponentialSumTable, r: f64) -> Result<EnergyValue> {
    if !(r > 1.0) {
        return Err(Error::arg("lower-bound functional needs r > 1"));
    }
    let d = table.d;
    let zero = table.index(&vec![0; d]).expect("origin in table");
    let nu_pow = |k: &[i64]| -> f64 {
        k.iter()
            .map(|&c| (c.unsigned_abs().max(1) as f64).powf(-r))
            .product()
    };
    let mut acc = NeumaierSum::new();
    for (idx, v) in table.values.iter().enumerate() {
        if idx != zero {
            acc.add(v.norm_sqr() * nu_pow(&table.frequency(idx)));
        }
    }
    let k_cut = table.cutoff;
    let s_k = 1.0 + 2.0 * (1..=k_cut).map(|k| (k as f64).powf(-r)).sum::<f64>();
    let tail_1d = 2.0 * (k_cut as f64).powf(1.0 - r) / (r - 1.0);
    let tail = table.weight_mass.powi(2) * ((s_k + tail_1d).powi(d as i32) - s_k.powi(d as i32));
    Ok(EnergyValue {
        value: acc.value(),
        tail_bound: tail,
    })
}

/// `σ^r(n, u) = Σ_{‖s‖₁=n} ∏_j min((2^{s_j} u_j)^{r/2}, (2^{s_j} u_j)^{-r/2})`,
/// each term evaluated in the log domain.
pub fn sigma_r(n: u32, u: &[f64], r: f64) -> Result<f64> {
    if n > 60 {
        return Err(Error::arg("sigma_r supports n <= 60"));
    }
    if u.is_empty() || u.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::arg("widths must be positive"));
    }
    if !(r > 0.0) {
        return Err(Error::arg("r must be positive"));
    }
    let log_u: Vec<f64> = u.iter().map(|x| x.ln()).collect();
    let ln2 = std::f64::consts::LN_2;
    let mut acc = NeumaierSum::new();
    let d = u.len();
    let mut s = vec![0u32; d];
    compositions(n, &mut s, 0, &mut |s| {
        let e: f64 = s
            .iter()
            .zip(&log_u)
            .map(|(&sj, &lu)| (f64::from(sj) * ln2 + lu).abs())
            .sum();
        acc.add((-0.5 * r * e).exp());
    });
    Ok(acc.value())
}

fn compositions(rest: u32, s: &mut [u32], j: usize, f: &mut impl FnMut(&[u32])) {
    if j + 1 == s.len() {
        s[j] = rest;
        f(s);
        return;
    }
    for v in 0..=rest {
        s[j] = v;
        compositions(rest - v, s, j + 1, f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointsets::{fibonacci_pointset, WeightedPointSet};

    fn single_origin(weight: f64) -> WeightedPointSet {
        WeightedPointSet::from_points(1, &[vec![0.0]], vec![weight]).unwrap()
    }

    #[test]
    fn cubature_examples() {
        let fib = fibonacci_pointset(10).unwrap();
        assert_eq!(apply_cubature(&fib, |_| 1.0).unwrap(), 1.0);
        assert_eq!(apply_cubature(&fib, |_| 0.0).unwrap(), 0.0);
        let spec = HatSpec::new(2, vec![0.0], vec![0.5]).unwrap();
        let v = apply_cubature(&single_origin(1.0), |x| spec.periodized_eval(x).unwrap()).unwrap();
        assert_eq!(v, 0.5);
    }

    #[test]
    fn non_finite_names_node() {
        let fib = fibonacci_pointset(5).unwrap();
        let err = apply_cubature(&fib, |x| if x[0] > 0.5 { f64::NAN } else { 1.0 }).unwrap_err();
        assert!(matches!(err, Error::NonFinite { index: 3 }));
    }

    #[test]
    fn spatial_error_examples() {
        let spec = HatSpec::new(2, vec![0.0], vec![0.5]).unwrap();
        assert_eq!(quadrature_error_spatial(&single_origin(1.0), &spec).unwrap(), 0.25);
        assert_eq!(quadrature_error_spatial(&single_origin(0.0), &spec).unwrap(), -0.25);
    }

    #[test]
    fn fourier_brackets_single_point() {
        let spec = HatSpec::new(2, vec![0.0], vec![0.5]).unwrap();
        let f = quadrature_error_fourier(&single_origin(1.0), &spec, 64, &FourierLimits::default()).unwrap();
        assert!((f.value - 0.25).abs() <= f.tail_bound);
        assert!(f.imag.abs() <= 1e-10);
        let z = quadrature_error_fourier(&single_origin(0.0), &spec, 64, &FourierLimits::default()).unwrap();
        assert_eq!(z.value, -0.25);
        assert_eq!(z.tail_bound, 0.0);
    }

    #[test]
    fn r1_is_spatial_only() {
        let spec = HatSpec::new(1, vec![0.0], vec![0.5]).unwrap();
        assert!(quadrature_error_fourier(&single_origin(1.0), &spec, 8, &FourierLimits::default()).is_err());
    }

    #[test]
    fn fibonacci_five_exponential_sums() {
        let ps = fibonacci_pointset(5).unwrap();
        let t = exponential_sums(&ps, 6, &FourierLimits::default()).unwrap();
        for (k, v) in t.iter() {
            let expected = if (k[0] + 3 * k[1]).rem_euclid(5) == 0 { 1.0 } else { 0.0 };
            assert!((v.re - expected).abs() < 1e-13 && v.im.abs() < 1e-13, "k={k:?} v={v}");
        }
        let star = lambda_star(&t);
        for (k, v) in t.iter() {
            assert!((star.get(&k).unwrap() - v.re).abs() < 1e-12);
        }
    }

    #[test]
    fn table_symmetries() {
        let ps = crate::pointsets::random_pointset(30, 2, 5).unwrap();
        let t = exponential_sums(&ps, 5, &FourierLimits::default()).unwrap();
        assert!((t.get(&[0, 0]).unwrap().re - 1.0).abs() < 1e-15);
        let star = lambda_star(&t);
        for (k, v) in t.iter() {
            let neg: Vec<i64> = k.iter().map(|c| -c).collect();
            let w = t.get(&neg).unwrap();
            assert!((v - w.conj()).norm() < 1e-13);
            assert!(v.norm() <= t.weight_mass() + 1e-13);
            assert!((star.get(&k).unwrap() - star.get(&neg).unwrap()).abs() < 1e-13);
        }
        assert!(t.get(&[6, 0]).is_none());
    }

    #[test]
    fn table_cap_and_cutoff() {
        let ps = fibonacci_pointset(10).unwrap();
        let lim = FourierLimits { max_work: 100.0 };
        assert!(matches!(exponential_sums(&ps, 4, &lim), Err(Error::ResourceLimit { .. })));
        assert!(exponential_sums(&ps, 0, &FourierLimits::default()).is_err());
    }

    #[test]
    fn energy_examples() {
        let t = exponential_sums(&single_origin(1.0), 2, &FourierLimits::default()).unwrap();
        let e = lower_bound_functional(&t, 2.0).unwrap();
        assert!((e.value - 2.5).abs() < 1e-14);
        let z = exponential_sums(&single_origin(0.0), 2, &FourierLimits::default()).unwrap();
        let e0 = lower_bound_functional(&z, 2.0).unwrap();
        assert_eq!(e0.value, 0.0);
        assert_eq!(e0.tail_bound, 0.0);
        assert!(lower_bound_functional(&t, 1.0).is_err());
    }

    #[test]
    fn energy_tail_bounds_full_sum() {
        // single unit point: Λ ≡ 1, so the full sum is 2 ζ(2) = π²/3
        let t = exponential_sums(&single_origin(1.0), 16, &FourierLimits::default()).unwrap();
        let e = lower_bound_functional(&t, 2.0).unwrap();
        let full = std::f64::consts::PI.powi(2) / 3.0;
        assert!(e.value <= full && full <= e.value + e.tail_bound);
    }

    #[test]
    fn sigma_examples() {
        let v = sigma_r(3, &[0.3], 2.0).unwrap();
        let t: f64 = 8.0 * 0.3;
        assert!((v - t.min(1.0 / t)).abs() < 1e-15);
        assert!((sigma_r(0, &[0.5, 0.5], 2.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(sigma_r(61, &[0.5], 2.0).is_err());
    }

    #[test]
    fn sigma_matches_direct_sum() {
        let u = [0.1, 0.37, 0.5];
        for n in 0..12u32 {
            let mut direct = 0.0;
            for a in 0..=n {
                for b in 0..=n - a {
                    let c = n - a - b;
                    let mut p = 1.0;
                    for (s, uj) in [a, b, c].iter().zip(u) {
                        let t = 2f64.powi(*s as i32) * uj;
                        p *= t.powf(1.5).min(t.powf(-1.5));
                    }
                    direct += p;
                }
            }
            let v = sigma_r(n, &u, 3.0).unwrap();
            assert!((v - direct).abs() <= 1e-13 * direct.max(1e-300), "n={n}");
        }
    }
}
