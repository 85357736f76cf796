//! Frolov admissible lattices.
//!
//! The lattice `L(m) = A m` is generated by the Vandermonde matrix
//! `A[i][j] = ξ_i^j` of the real roots `ξ_1 < … < ξ_d` of
//! `P(x) = ∏_{j=1}^d (x - (2j-1)) - 1`. Because `P` is monic, integral and
//! irreducible, the norm form `∏_i L_i(m)` is a nonzero integer for every
//! integer `m ≠ 0`, which in turn bounds the number of lattice points in any
//! axis-parallel box by its volume plus one.
//!
//! Cubature nodes live on the scaled dual lattice `(A^{-1})^T m / a`.

use crate::error::{check_cap, Error, Result};
use crate::io::to_json_string;
use nalgebra::DMatrix;
use serde::Serialize;

pub const MAX_DIM: usize = 6;

/// Caps on enumeration work. Exceeding a cap is an error, never a truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumerationLimits {
    /// Maximum number of integer candidate vectors visited by one enumeration.
    pub max_candidates: u64,
    /// Maximum `‖s‖₁` accepted by dyadic block counts.
    pub max_block_order: u32,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        Self {
            max_candidates: 100_000_000,
            max_block_order: 48,
        }
    }
}

/// Half-open axis-parallel box `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::arg("box corners must have the same nonzero dimension"));
        }
        for (j, (&l, &h)) in lo.iter().zip(&hi).enumerate() {
            if !l.is_finite() || !h.is_finite() {
                return Err(Error::arg(format!("box is unbounded in coordinate {j}")));
            }
            if h < l {
                return Err(Error::arg(format!("box is empty in coordinate {j}: {h} < {l}")));
            }
        }
        Ok(Self { lo, hi })
    }

    pub fn cube(d: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; d], vec![hi; d])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    #[inline]
    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&x, (&l, &h))| x >= l && x < h)
    }
}

/// Index set `ρ(s) = {k : [2^{s_j-1}] <= |k_j| < 2^{s_j}}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DyadicBlock {
    pub s: Vec<u32>,
}

impl DyadicBlock {
    pub fn new(s: Vec<u32>) -> Self {
        Self { s }
    }

    /// `‖s‖₁`.
    pub fn order(&self) -> u32 {
        self.s.iter().sum()
    }

    fn lower(sj: u32) -> f64 {
        if sj == 0 {
            0.0
        } else {
            2f64.powi(sj as i32 - 1)
        }
    }

    fn upper(sj: u32) -> f64 {
        2f64.powi(sj as i32)
    }

    pub fn contains(&self, k: &[f64]) -> bool {
        k.iter().zip(&self.s).all(|(&kj, &sj)| {
            let a = kj.abs();
            a >= Self::lower(sj) && a < Self::upper(sj)
        })
    }
}

/// Smallest `n0` with `2^{n0} >= a^d`.
pub fn min_block_order(d: usize, a: f64) -> u32 {
    let target = d as f64 * a.log2();
    let mut n = target.ceil().max(0.0) as u32;
    // guard against log rounding either way
    while n > 0 && 2f64.powi(n as i32 - 1) >= a.powi(d as i32) {
        n -= 1;
    }
    while 2f64.powi(n as i32) < a.powi(d as i32) {
        n += 1;
    }
    n
}

/// `P(x) = ∏_{j=1}^d (x - (2j-1)) - 1` with its real roots in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrolovPolynomial {
    pub degree: usize,
    /// Coefficients in ascending powers, `coefficients[k]` multiplies `x^k`.
    pub coefficients: Vec<i64>,
    pub roots: Vec<f64>,
}

impl FrolovPolynomial {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 || d > MAX_DIM {
            return Err(Error::arg(format!(
                "unsupported dimension {d}; expected 1..={MAX_DIM}"
            )));
        }
        let mut coefficients = vec![1i64];
        for j in 1..=d as i64 {
            let c = -(2 * j - 1);
            let mut next = vec![0i64; coefficients.len() + 1];
            for (k, &a) in coefficients.iter().enumerate() {
                next[k + 1] += a;
                next[k] += c * a;
            }
            coefficients = next;
        }
        coefficients[0] -= 1;

        let roots = if d == 1 {
            // P(x) = x - 2: the root sits on the bracket boundary, take it directly
            vec![2.0]
        } else {
            let mut roots = Vec::with_capacity(d);
            for j in 1..=d {
                roots.push(bracketed_root(&coefficients, 2.0 * j as f64 - 2.0, 2.0 * j as f64)?);
            }
            roots
        };
        Ok(Self {
            degree: d,
            coefficients,
            roots,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.coefficients, x)
    }

    fn eval_derivative(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (k, &c) in self.coefficients.iter().enumerate().skip(1).rev() {
            acc = acc * x + (k as i64 * c) as f64;
        }
        acc
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.coefficients.iter().map(|c| c.abs()).max().unwrap_or(0) as f64
    }
}

fn horner(coefficients: &[i64], x: f64) -> f64 {
    coefficients
        .iter()
        .rev()
        .fold(0.0, |acc, &c| acc * x + c as f64)
}

/// Bisection on a sign-change bracket to 1e-14, then two Newton polish steps
/// (each kept only if it stays inside the bracket and does not increase |P|).
fn bracketed_root(coefficients: &[i64], lo: f64, hi: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (horner(coefficients, a), horner(coefficients, b));
    if fa == 0.0 || fb == 0.0 || fa.signum() == fb.signum() {
        return Err(Error::Construction(format!(
            "no sign change of P on ({lo}, {hi}): P({lo}) = {fa}, P({hi}) = {fb}"
        )));
    }
    let sa = fa.signum();
    while b - a > 1e-14 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = horner(coefficients, mid);
        if fm == 0.0 {
            a = mid;
            b = mid;
            break;
        }
        if fm.signum() == sa {
            a = mid;
        } else {
            b = mid;
        }
    }
    let poly = FrolovPolynomial {
        degree: coefficients.len() - 1,
        coefficients: coefficients.to_vec(),
        roots: Vec::new(),
    };
    let mut x = 0.5 * (a + b);
    for _ in 0..2 {
        let fx = poly.eval(x);
        let dfx = poly.eval_derivative(x);
        if dfx == 0.0 {
            break;
        }
        let next = x - fx / dfx;
        if next > lo && next < hi && poly.eval(next).abs() <= fx.abs() {
            x = next;
        }
    }
    Ok(x)
}

/// Minimum of `|∏_j L_j(m)|` over a search cube together with its argmin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormFormMin {
    pub value: f64,
    pub argmin: Vec<i64>,
}

/// A dual-lattice node `(A^{-1})^T m / a` and its integer label.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPoint {
    pub m: Vec<i64>,
    pub x: Vec<f64>,
}

/// Frolov lattice `A Z^d` together with the scale `a` of its dual node set.
#[derive(Debug, Clone)]
pub struct AdmissibleLattice {
    d: usize,
    a: f64,
    poly: FrolovPolynomial,
    matrix: DMatrix<f64>,
    inverse: DMatrix<f64>,
    det: f64,
    condition: f64,
}

/// Condition-number ceiling for the Vandermonde inverse.
pub const MAX_CONDITION: f64 = 1e12;

impl AdmissibleLattice {
    /// Builds the lattice for dimension `d` (1 is accepted as a degenerate
    /// mode with `A = [1]`) and scale `a > 1`.
    pub fn frolov(d: usize, a: f64) -> Result<Self> {
        if !(a > 1.0) || !a.is_finite() {
            return Err(Error::arg(format!("scale a = {a} must exceed 1")));
        }
        let poly = FrolovPolynomial::new(d)?;
        let matrix = DMatrix::from_fn(d, d, |i, j| poly.roots[i].powi(j as i32));
        let inverse = matrix
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Construction("Vandermonde matrix is singular".into()))?;
        let condition = inf_norm(&matrix) * inf_norm(&inverse);
        if !(condition <= MAX_CONDITION) {
            return Err(Error::IllConditioned(condition));
        }
        let mut det = 1.0;
        for i in 0..d {
            for j in i + 1..d {
                det *= poly.roots[j] - poly.roots[i];
            }
        }
        Ok(Self {
            d,
            a,
            poly,
            matrix,
            inverse,
            det,
            condition,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn scale(&self) -> f64 {
        self.a
    }

    pub fn polynomial(&self) -> &FrolovPolynomial {
        &self.poly
    }

    pub fn roots(&self) -> &[f64] {
        &self.poly.roots
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    /// `(A^{-1})^T`.
    pub fn inverse_transpose(&self) -> DMatrix<f64> {
        self.inverse.transpose()
    }

    /// Vandermonde determinant `∏_{i<j} (ξ_j - ξ_i)`.
    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    /// Weight `(a^d |det A|)^{-1}` shared by every node of the dual-lattice cubature.
    pub fn node_weight(&self) -> f64 {
        1.0 / (self.a.powi(self.d as i32) * self.det.abs())
    }

    /// `L(m) = A m`.
    pub fn apply(&self, m: &[i64]) -> Vec<f64> {
        (0..self.d)
            .map(|i| (0..self.d).map(|j| self.matrix[(i, j)] * m[j] as f64).sum())
            .collect()
    }

    /// `(A^{-1})^T m / a`.
    pub fn dual_point(&self, m: &[i64]) -> Vec<f64> {
        (0..self.d)
            .map(|i| (0..self.d).map(|j| self.inverse[(j, i)] * m[j] as f64).sum::<f64>() / self.a)
            .collect()
    }

    /// `∏_j L_j(m)`.
    pub fn norm_form(&self, m: &[i64]) -> f64 {
        self.apply(m).iter().product()
    }

    /// Smallest `|∏_j L_j(m)|` over `0 < ‖m‖_∞ <= radius`. Ties keep the
    /// lexicographically first `m`.
    pub fn norm_form_min(&self, radius: i64, limits: &EnumerationLimits) -> Result<NormFormMin> {
        if radius < 1 {
            return Err(Error::arg("norm form search radius must be at least 1"));
        }
        let ranges = vec![(-radius, radius); self.d];
        check_cap(
            "norm form scan",
            candidate_count(&ranges),
            limits.max_candidates as f64,
        )?;
        let mut best = NormFormMin {
            value: f64::INFINITY,
            argmin: Vec::new(),
        };
        for_each_integer(&ranges, |m| {
            if m.iter().all(|&c| c == 0) {
                return;
            }
            let v = self.norm_form(m).abs();
            if v < best.value {
                best.value = v;
                best.argmin = m.to_vec();
            }
        });
        Ok(best)
    }

    /// Number of lattice points `A m` in the half-open box.
    pub fn box_point_count(&self, bx: &AxisBox, limits: &EnumerationLimits) -> Result<u64> {
        self.check_box_dim(bx)?;
        // m = A^{-1} y
        let ranges = integer_ranges(&self.inverse, &bx.lo, &bx.hi, 1.0);
        check_cap(
            "lattice box count",
            candidate_count(&ranges),
            limits.max_candidates as f64,
        )?;
        let mut count = 0u64;
        for_each_integer(&ranges, |m| {
            if bx.contains(&self.apply(m)) {
                count += 1;
            }
        });
        Ok(count)
    }

    /// All dual nodes `(A^{-1})^T m / a` inside `target`, in lexicographic order of `m`.
    pub fn enumerate_dual_points(
        &self,
        target: &AxisBox,
        limits: &EnumerationLimits,
    ) -> Result<Vec<DualPoint>> {
        self.check_box_dim(target)?;
        if target.lo.iter().any(|&l| l < -2.0) || target.hi.iter().any(|&h| h > 3.0) {
            return Err(Error::arg("enumeration target must lie inside [-2, 3)^d"));
        }
        if target.volume() == 0.0 {
            return Ok(Vec::new());
        }
        // m = a A^T x
        let at = self.matrix.transpose();
        let ranges = integer_ranges(&at, &target.lo, &target.hi, self.a);
        check_cap(
            "dual lattice enumeration",
            candidate_count(&ranges),
            limits.max_candidates as f64,
        )?;
        let mut out = Vec::new();
        for_each_integer(&ranges, |m| {
            let x = self.dual_point(m);
            if target.contains(&x) {
                out.push(DualPoint { m: m.to_vec(), x });
            }
        });
        Ok(out)
    }

    /// `|ρ(s) ∩ {a A m : m ≠ 0}|`.
    pub fn count_points_in_dyadic_block(
        &self,
        block: &DyadicBlock,
        limits: &EnumerationLimits,
    ) -> Result<u64> {
        if block.s.len() != self.d {
            return Err(Error::arg("dyadic block dimension does not match lattice"));
        }
        if block.order() > limits.max_block_order {
            return Err(Error::ResourceLimit {
                what: "dyadic block order",
                required: block.order() as f64,
                cap: limits.max_block_order as f64,
            });
        }
        let hi: Vec<f64> = block.s.iter().map(|&s| 2f64.powi(s as i32)).collect();
        let lo: Vec<f64> = hi.iter().map(|h| -h).collect();
        // m = A^{-1} k / a
        let ranges = integer_ranges(&self.inverse, &lo, &hi, 1.0 / self.a);
        check_cap(
            "dyadic block count",
            candidate_count(&ranges),
            limits.max_candidates as f64,
        )?;
        let mut count = 0u64;
        for_each_integer(&ranges, |m| {
            if m.iter().all(|&c| c == 0) {
                return;
            }
            let k: Vec<f64> = self.apply(m).iter().map(|v| v * self.a).collect();
            if block.contains(&k) {
                count += 1;
            }
        });
        Ok(count)
    }

    fn check_box_dim(&self, bx: &AxisBox) -> Result<()> {
        if bx.dim() != self.d {
            return Err(Error::arg(format!(
                "box dimension {} does not match lattice dimension {}",
                bx.dim(),
                self.d
            )));
        }
        Ok(())
    }

    pub fn export(&self) -> LatticeExport {
        let rows = |m: &DMatrix<f64>| -> Vec<Vec<f64>> {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
                .collect()
        };
        LatticeExport {
            d: self.d,
            a: self.a,
            coefficients: self.poly.coefficients.clone(),
            roots: self.poly.roots.clone(),
            a_matrix: rows(&self.matrix),
            a_inv_t: rows(&self.inverse_transpose()),
            det_a: self.det,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(to_json_string(&self.export())?)
    }
}

/// JSON form of a lattice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeExport {
    pub d: usize,
    pub a: f64,
    pub coefficients: Vec<i64>,
    pub roots: Vec<f64>,
    #[serde(rename = "A")]
    pub a_matrix: Vec<Vec<f64>>,
    #[serde(rename = "A_inv_T")]
    pub a_inv_t: Vec<Vec<f64>>,
    #[serde(rename = "det_A")]
    pub det_a: f64,
}

fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Integer ranges covering `{ scale * M y : y in [lo, hi] }` by interval
/// arithmetic, padded by one on each side against rounding.
fn integer_ranges(m: &DMatrix<f64>, lo: &[f64], hi: &[f64], scale: f64) -> Vec<(i64, i64)> {
    (0..m.nrows())
        .map(|i| {
            let (mut a, mut b) = (0.0, 0.0);
            for j in 0..m.ncols() {
                let c = m[(i, j)] * scale;
                let (p, q) = (c * lo[j], c * hi[j]);
                a += p.min(q);
                b += p.max(q);
            }
            (a.floor() as i64 - 1, b.ceil() as i64 + 1)
        })
        .collect()
}

fn candidate_count(ranges: &[(i64, i64)]) -> f64 {
    ranges
        .iter()
        .map(|&(a, b)| (b - a + 1).max(0) as f64)
        .product()
}

/// Visits every integer vector in the product of inclusive ranges, last
/// coordinate fastest.
pub(crate) fn for_each_integer(ranges: &[(i64, i64)], mut f: impl FnMut(&[i64])) {
    if ranges.iter().any(|&(a, b)| b < a) {
        return;
    }
    let mut m: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        f(&m);
        let mut j = ranges.len();
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            if m[j] < ranges[j].1 {
                m[j] += 1;
                break;
            }
            m[j] = ranges[j].0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_roots_and_det() {
        let lat = AdmissibleLattice::frolov(2, 4.0).unwrap();
        assert_eq!(lat.polynomial().coefficients, vec![2, -4, 1]);
        let s2 = std::f64::consts::SQRT_2;
        assert!((lat.roots()[0] - (2.0 - s2)).abs() < 1e-14);
        assert!((lat.roots()[1] - (2.0 + s2)).abs() < 1e-14);
        assert!((lat.det() - 2.0 * s2).abs() < 1e-14);
    }

    #[test]
    fn cubic_coefficients_and_brackets() {
        let p = FrolovPolynomial::new(3).unwrap();
        assert_eq!(p.coefficients, vec![-16, 23, -9, 1]);
        for (j, r) in p.roots.iter().enumerate() {
            assert!(*r > 2.0 * j as f64 && *r < 2.0 * j as f64 + 2.0);
        }
    }

    #[test]
    fn roots_satisfy_polynomial() {
        for d in 1..=MAX_DIM {
            let p = FrolovPolynomial::new(d).unwrap();
            assert_eq!(p.roots.len(), d);
            for w in p.roots.windows(2) {
                assert!(w[0] < w[1]);
            }
            for &r in &p.roots {
                assert!(p.eval(r).abs() <= 1e-10 * p.max_abs_coefficient(), "d={d} root {r}");
            }
        }
    }

    #[test]
    fn matrix_invariants() {
        for d in 2..=MAX_DIM {
            let lat = AdmissibleLattice::frolov(d, 2.0).unwrap();
            let prod = lat.matrix() * lat.inverse();
            for i in 0..d {
                for j in 0..d {
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((prod[(i, j)] - e).abs() < 1e-10, "d={d}");
                }
            }
            let lu_det = lat.matrix().clone().determinant();
            assert!((lu_det - lat.det()).abs() <= 1e-10 * lat.det().abs(), "d={d}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(AdmissibleLattice::frolov(7, 4.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(AdmissibleLattice::frolov(0, 4.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(AdmissibleLattice::frolov(2, 1.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(AdmissibleLattice::frolov(2, 0.5), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn norm_form_examples() {
        let lat = AdmissibleLattice::frolov(2, 4.0).unwrap();
        assert!((lat.norm_form(&[1, 0]) - 1.0).abs() < 1e-14);
        assert_eq!(lat.apply(&[1, 0]), vec![1.0, 1.0]);
        assert!((lat.norm_form(&[0, 1]) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn norm_form_min_small_radius() {
        let lat = AdmissibleLattice::frolov(2, 4.0).unwrap();
        let res = lat.norm_form_min(20, &EnumerationLimits::default()).unwrap();
        assert!(res.value >= 1.0 - 1e-6);
        assert!(lat.norm_form_min(0, &EnumerationLimits::default()).is_err());
    }

    #[test]
    fn degenerate_box_counts() {
        let lat = AdmissibleLattice::frolov(2, 4.0).unwrap();
        let lim = EnumerationLimits::default();
        let slab = AxisBox::new(vec![0.3, -5.0], vec![0.3, 5.0]).unwrap();
        assert!(lat.box_point_count(&slab, &lim).unwrap() <= 1);
        assert!(AxisBox::new(vec![1.0, 0.0], vec![0.0, 1.0]).is_err());
        assert!(AxisBox::new(vec![0.0, 0.0], vec![f64::INFINITY, 1.0]).is_err());
    }

    #[test]
    fn one_dimensional_dual_points() {
        let lat = AdmissibleLattice::frolov(1, 4.0).unwrap();
        assert_eq!(lat.matrix()[(0, 0)], 1.0);
        let pts = lat
            .enumerate_dual_points(&AxisBox::cube(1, 0.0, 1.0).unwrap(), &EnumerationLimits::default())
            .unwrap();
        let xs: Vec<f64> = pts.iter().map(|p| p.x[0]).collect();
        assert_eq!(xs, vec![0.0, 0.25, 0.5, 0.75]);
    }

    #[test]
    fn zero_volume_target_is_empty() {
        let lat = AdmissibleLattice::frolov(2, 8.0).unwrap();
        let t = AxisBox::new(vec![0.0, 0.5], vec![1.0, 0.5]).unwrap();
        assert!(lat
            .enumerate_dual_points(&t, &EnumerationLimits::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn enumeration_guard_and_cap() {
        let lat = AdmissibleLattice::frolov(2, 8.0).unwrap();
        let big = AxisBox::cube(2, -3.0, 1.0).unwrap();
        assert!(matches!(
            lat.enumerate_dual_points(&big, &EnumerationLimits::default()),
            Err(Error::InvalidArgument(_))
        ));
        let lim = EnumerationLimits {
            max_candidates: 10,
            ..Default::default()
        };
        let unit = AxisBox::cube(2, 0.0, 1.0).unwrap();
        assert!(matches!(
            lat.enumerate_dual_points(&unit, &lim),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn dyadic_block_membership() {
        let b = DyadicBlock::new(vec![0, 3]);
        assert!(b.contains(&[0.5, 4.0]));
        assert!(b.contains(&[-0.9, -7.9]));
        assert!(!b.contains(&[1.0, 4.0]));
        assert!(!b.contains(&[0.0, 8.0]));
        assert!(!b.contains(&[0.0, 3.9]));
        assert_eq!(b.order(), 3);
    }

    #[test]
    fn small_blocks_are_empty() {
        let lat = AdmissibleLattice::frolov(2, 4.0).unwrap();
        let lim = EnumerationLimits::default();
        let n0 = min_block_order(2, 4.0);
        assert_eq!(n0, 4);
        assert_eq!(lat.count_points_in_dyadic_block(&DyadicBlock::new(vec![0, 0]), &lim).unwrap(), 0);
        for n in 0..n0 {
            for s0 in 0..=n {
                let b = DyadicBlock::new(vec![s0, n - s0]);
                assert_eq!(lat.count_points_in_dyadic_block(&b, &lim).unwrap(), 0, "s={:?}", b.s);
            }
        }
    }

    #[test]
    fn min_block_order_values() {
        assert_eq!(min_block_order(2, 8.0), 6);
        assert_eq!(min_block_order(2, 5.66), 6);
        assert_eq!(min_block_order(2, 5.65), 5);
        assert_eq!(min_block_order(3, 2.0), 3);
    }

    #[test]
    fn export_json_shape() {
        let lat = AdmissibleLattice::frolov(2, 8.0).unwrap();
        let json = lat.to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["d"], 2);
        assert_eq!(v["coefficients"], serde_json::json!([2, -4, 1]));
        assert_eq!(v["A"][1][1].as_f64().unwrap(), lat.roots()[1]);
        assert_eq!(v["A_inv_T"].as_array().unwrap().len(), 2);
        assert!(json.contains("e-1"));
    }

    #[test]
    fn odometer_order() {
        let mut seen = Vec::new();
        for_each_integer(&[(0, 1), (-1, 0)], |m| seen.push(m.to_vec()));
        assert_eq!(seen, vec![vec![0, -1], vec![0, 0], vec![1, -1], vec![1, 0]]);
    }
}
