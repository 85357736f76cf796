//! Minimax cubature weights: `min_λ max_i |c_i - Σ_μ λ_μ H_{iμ}|`.
//!
//! With `λ = λ⁺ - λ⁻` and the bound `t`, the primal LP is
//! `min t` subject to `t ± (c_i - H_i·λ) >= 0` and optionally
//! `Σ (λ⁺ + λ⁻) <= B`. Its dual has a nonnegative right-hand side, so the
//! simplex starts from the slack basis; the primal weights are read off the
//! final reduced costs.

use super::simplex::{LpOutcome, LpSolution, Tableau};
use super::sample_widths;
use crate::error::{check_cap, Error, PartialSolution, Result};
use crate::kernels::{pr, Hat};
use crate::pointsets::SplitMix64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimaxLimits {
    pub max_points: usize,
    pub max_samples: usize,
    pub max_iterations: usize,
    /// Allowed gap between the LP objective and the recomputed max residual.
    pub verify_tol: f64,
}

impl Default for MinimaxLimits {
    fn default() -> Self {
        Self {
            max_points: 500,
            max_samples: 20_000,
            max_iterations: 200_000,
            verify_tol: 1e-9,
        }
    }
}

/// One test kernel `h̃^r(·, z, u)` of the constraint sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub z: Vec<f64>,
    pub u: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimaxSolution {
    pub weights: Vec<f64>,
    /// Max residual recomputed at `weights`.
    pub value: f64,
    pub lp_value: f64,
    pub equal_weights_value: f64,
    pub iterations: usize,
}

/// `count` kernels with uniform shifts and widths on `pr(u) = v`.
pub fn constraint_sample(d: usize, v: f64, count: usize, seed: u64) -> Result<Vec<SamplePoint>> {
    if count == 0 {
        return Err(Error::arg("constraint sample must be nonempty"));
    }
    if !(v > 0.0 && v <= 0.5f64.powi(d as i32)) {
        return Err(Error::arg(format!("volume v = {v} outside (0, 2^-{d}]")));
    }
    let widths = sample_widths(d, v, 0.5, count, seed)?;
    let mut rng = SplitMix64::new(seed ^ 0x5DEE_CE66_D1CE_5EED);
    Ok((0..count)
        .map(|i| SamplePoint {
            z: (0..d).map(|_| rng.next_f64()).collect(),
            u: widths[i % widths.len()].clone(),
        })
        .collect())
}

/// Exact integrals `pr(u)^r` of the sampled kernels.
pub fn sample_integrals(sample: &[SamplePoint], r: u32) -> Vec<f64> {
    sample.iter().map(|s| pr(&s.u).powi(r as i32)).collect()
}

/// Row-major `H_{iμ} = ∏_j h̃^r(x^μ_j - z^i_j, u^i_j)`.
pub fn kernel_matrix(positions: &[Vec<f64>], r: u32, sample: &[SamplePoint]) -> Result<Vec<f64>> {
    let m = positions.len();
    let mut h = Vec::with_capacity(sample.len() * m);
    for s in sample {
        if s.z.len() != s.u.len() {
            return Err(Error::arg("sample z and u dimensions differ"));
        }
        let hats = s
            .u
            .iter()
            .map(|&u| Hat::new(r, u))
            .collect::<Result<Vec<_>>>()?;
        for x in positions {
            if x.len() != s.z.len() {
                return Err(Error::arg("position and sample dimensions differ"));
            }
            let mut prod = 1.0;
            for ((hat, &xj), &zj) in hats.iter().zip(x).zip(&s.z) {
                prod *= hat.eval_periodic(xj - zj);
            }
            h.push(prod);
        }
    }
    Ok(h)
}

fn max_residual(h: &[f64], c: &[f64], w: &[f64]) -> f64 {
    let m = w.len();
    c.iter()
        .enumerate()
        .map(|(i, &ci)| {
            let row = &h[i * m..(i + 1) * m];
            (ci - row.iter().zip(w).map(|(a, b)| a * b).sum::<f64>()).abs()
        })
        .fold(0.0, f64::max)
}

/// Objective at `λ_μ = 1/m`.
pub fn equal_weights_objective(h: &[f64], integrals: &[f64], m: usize) -> f64 {
    max_residual(h, integrals, &vec![1.0 / m as f64; m])
}

fn weights_from(sol: &LpSolution, m: usize) -> Vec<f64> {
    (0..m).map(|mu| sol.duals[mu] - sol.duals[m + mu]).collect()
}

pub fn optimize_weights_minimax(
    positions: &[Vec<f64>],
    r: u32,
    sample: &[SamplePoint],
    integrals: &[f64],
    mass_bound: Option<f64>,
    limits: &MinimaxLimits,
) -> Result<MinimaxSolution> {
    let m = positions.len();
    let n = sample.len();
    if m == 0 {
        return Err(Error::arg("position list is empty"));
    }
    if n == 0 {
        return Err(Error::arg("constraint sample is empty"));
    }
    if integrals.len() != n {
        return Err(Error::arg("one integral value per sample is required"));
    }
    if let Some(b) = mass_bound {
        if !(b >= 0.0) {
            return Err(Error::arg(format!("mass bound B = {b} must be nonnegative")));
        }
    }
    check_cap("minimax LP points", m as f64, limits.max_points as f64)?;
    check_cap("minimax LP samples", n as f64, limits.max_samples as f64)?;

    let h = kernel_matrix(positions, r, sample)?;
    let rows = 2 * m + 1;
    let cols = 2 * n + usize::from(mass_bound.is_some());
    // dual constraint matrix, transposed primal rows
    let mut a = vec![0.0; rows * cols];
    let mut obj = vec![0.0; cols];
    for i in 0..n {
        let (kp, km) = (2 * i, 2 * i + 1);
        obj[kp] = integrals[i];
        obj[km] = -integrals[i];
        for mu in 0..m {
            let hv = h[i * m + mu];
            a[mu * cols + kp] = hv;
            a[(m + mu) * cols + kp] = -hv;
            a[mu * cols + km] = -hv;
            a[(m + mu) * cols + km] = hv;
        }
        a[2 * m * cols + kp] = 1.0;
        a[2 * m * cols + km] = 1.0;
    }
    if let Some(b) = mass_bound {
        let k = 2 * n;
        obj[k] = -b;
        for p in 0..2 * m {
            a[p * cols + k] = -1.0;
        }
    }
    let mut rhs = vec![0.0; rows];
    rhs[2 * m] = 1.0;

    let equal = equal_weights_objective(&h, integrals, m);
    match Tableau::new(&a, &rhs, &obj).solve(limits.max_iterations) {
        LpOutcome::Optimal(sol) => {
            let weights = weights_from(&sol, m);
            let value = max_residual(&h, integrals, &weights);
            let scale = integrals.iter().fold(1.0f64, |s, c| s.max(c.abs()));
            if (value - sol.objective).abs() > limits.verify_tol * scale {
                return Err(Error::Construction(format!(
                    "LP objective {} disagrees with recomputed max residual {}",
                    sol.objective, value
                )));
            }
            Ok(MinimaxSolution {
                weights,
                value,
                lp_value: sol.objective,
                equal_weights_value: equal,
                iterations: sol.iterations,
            })
        }
        LpOutcome::Stalled(sol) => {
            let weights = weights_from(&sol, m);
            let value = max_residual(&h, integrals, &weights);
            Err(Error::NonConvergence {
                iterations: sol.iterations,
                best: Some(PartialSolution { weights, value }),
            })
        }
        LpOutcome::Unbounded => Err(Error::Construction(
            "minimax dual LP unbounded (primal infeasible)".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_single_kernel() {
        let sample = vec![SamplePoint {
            z: vec![0.0],
            u: vec![0.5],
        }];
        let c = sample_integrals(&sample, 2);
        assert_eq!(c, vec![0.25]);
        let sol = optimize_weights_minimax(&[vec![0.0]], 2, &sample, &c, None, &MinimaxLimits::default()).unwrap();
        assert!((sol.weights[0] - 0.5).abs() < 1e-9);
        assert!(sol.value.abs() < 1e-9);
    }

    #[test]
    fn argument_errors() {
        let sample = vec![SamplePoint {
            z: vec![0.0],
            u: vec![0.5],
        }];
        let lim = MinimaxLimits::default();
        assert_eq!(
            optimize_weights_minimax(&[], 2, &sample, &[0.25], None, &lim).unwrap_err().exit_code(),
            2
        );
        assert!(optimize_weights_minimax(&[vec![0.0]], 2, &sample, &[0.25], Some(-1.0), &lim).is_err());
        assert!(optimize_weights_minimax(&[vec![0.0]], 2, &[], &[], None, &lim).is_err());
    }

    #[test]
    fn mass_bound_respected() {
        let pos: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64 / 6.0, (i * 5 % 6) as f64 / 6.0]).collect();
        let sample = constraint_sample(2, 0.1, 60, 3).unwrap();
        let c = sample_integrals(&sample, 2);
        let lim = MinimaxLimits::default();
        let free = optimize_weights_minimax(&pos, 2, &sample, &c, None, &lim).unwrap();
        assert!(free.value <= free.equal_weights_value + 1e-12);
        let bound = 0.5;
        let tied = optimize_weights_minimax(&pos, 2, &sample, &c, Some(bound), &lim).unwrap();
        assert!(tied.weights.iter().map(|w| w.abs()).sum::<f64>() <= bound + 1e-9);
        assert!(tied.value >= free.value - 1e-12);
        let zero = optimize_weights_minimax(&pos, 2, &sample, &c, Some(0.0), &lim).unwrap();
        assert!(zero.weights.iter().all(|w| w.abs() < 1e-9));
        let cmax = c.iter().cloned().fold(0.0, f64::max);
        assert!((zero.value - cmax).abs() < 1e-9);
    }

    #[test]
    fn iteration_cap_returns_partial() {
        let pos: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64 / 5.0]).collect();
        let sample = constraint_sample(1, 0.2, 30, 1).unwrap();
        let c = sample_integrals(&sample, 2);
        let lim = MinimaxLimits {
            max_iterations: 1,
            ..Default::default()
        };
        match optimize_weights_minimax(&pos, 2, &sample, &c, None, &lim) {
            Err(Error::NonConvergence { best: Some(p), .. }) => assert_eq!(p.weights.len(), 5),
            other => panic!("{other:?}"),
        }
    }
}
