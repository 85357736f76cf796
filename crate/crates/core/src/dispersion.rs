//! Largest empty axis-parallel box in the unit cube.
//!
//! Points on the boundary of a box do not block it, so the supremum over
//! half-open empty boxes is attained by a box whose faces lie in
//! `{0, 1} ∪ {point coordinates}`. The search enumerates face pairs in the
//! first `d - 1` coordinates, keeping only points strictly inside, and takes
//! the widest gap in the last coordinate.

use crate::error::{check_cap, Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionLimits {
    /// Cap on `(n + 2)^{2d}`.
    pub max_candidates: f64,
}

impl Default for DispersionLimits {
    fn default() -> Self {
        Self { max_candidates: 6e10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmptyBoxMethod {
    ExactGrid,
    PrunedSearch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmptyBoxResult {
    pub volume: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub method: EmptyBoxMethod,
}

#[derive(Debug, Clone, PartialEq)]
struct Found {
    volume: f64,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

/// `disp(T)` for `n = points.len() / d` points given row-major.
pub fn dispersion(points: &[f64], d: usize) -> Result<EmptyBoxResult> {
    dispersion_with_limits(points, d, &DispersionLimits::default())
}

pub fn dispersion_with_limits(points: &[f64], d: usize, limits: &DispersionLimits) -> Result<EmptyBoxResult> {
    if d == 0 || points.len() % d != 0 {
        return Err(Error::arg("coordinate count is not a multiple of d"));
    }
    if points.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::arg("points must lie in [0,1]^d"));
    }
    let n = points.len() / d;
    check_cap(
        "dispersion candidate boxes",
        (n as f64 + 2.0).powi(2 * d as i32),
        limits.max_candidates,
    )?;
    let cands: Vec<Vec<f64>> = (0..d)
        .map(|j| {
            let mut v: Vec<f64> = (0..n).map(|i| points[i * d + j]).collect();
            v.push(0.0);
            v.push(1.0);
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        })
        .collect();
    let all: Vec<usize> = (0..n).collect();
    let best = if d == 1 {
        leaf(points, d, &all, 1.0, &[], &[])
    } else {
        // split on the first lower face, reduce deterministically
        let c0 = &cands[0];
        (0..c0.len())
            .into_par_iter()
            .map(|a| {
                let mut best = Found {
                    volume: 0.0,
                    lower: vec![0.0; d],
                    upper: vec![0.0; d],
                };
                let mut lo = vec![0.0; d];
                let mut hi = vec![0.0; d];
                for b in a + 1..c0.len() {
                    lo[0] = c0[a];
                    hi[0] = c0[b];
                    let w = hi[0] - lo[0];
                    if w <= best.volume {
                        continue;
                    }
                    let inside: Vec<usize> = all
                        .iter()
                        .copied()
                        .filter(|&i| points[i * d] > lo[0] && points[i * d] < hi[0])
                        .collect();
                    descend(points, d, &cands, 1, w, &inside, &mut lo, &mut hi, &mut best);
                }
                best
            })
            .reduce_with(|x, y| if y.volume > x.volume { y } else { x })
            .expect("candidate list is nonempty")
    };
    Ok(EmptyBoxResult {
        volume: best.volume,
        lower: best.lower,
        upper: best.upper,
        method: EmptyBoxMethod::ExactGrid,
    })
}

#[allow(clippy::too_many_arguments)]
fn descend(
    points: &[f64],
    d: usize,
    cands: &[Vec<f64>],
    j: usize,
    width: f64,
    inside: &[usize],
    lo: &mut Vec<f64>,
    hi: &mut Vec<f64>,
    best: &mut Found,
) {
    if j == d - 1 {
        let f = leaf(points, d, inside, width, &lo[..j], &hi[..j]);
        if f.volume > best.volume {
            *best = f;
        }
        return;
    }
    let c = &cands[j];
    for a in 0..c.len() {
        for b in a + 1..c.len() {
            let w = width * (c[b] - c[a]);
            if w <= best.volume {
                continue;
            }
            lo[j] = c[a];
            hi[j] = c[b];
            let next: Vec<usize> = inside
                .iter()
                .copied()
                .filter(|&i| points[i * d + j] > c[a] && points[i * d + j] < c[b])
                .collect();
            descend(points, d, cands, j + 1, w, &next, lo, hi, best);
        }
    }
}

/// Widest gap in the last coordinate among points still inside.
fn leaf(points: &[f64], d: usize, inside: &[usize], width: f64, lo: &[f64], hi: &[f64]) -> Found {
    let j = d - 1;
    let mut ys: Vec<f64> = inside.iter().map(|&i| points[i * d + j]).collect();
    ys.push(0.0);
    ys.push(1.0);
    ys.sort_by(f64::total_cmp);
    let mut gap = (0.0, 0.0, 1.0);
    for w in ys.windows(2) {
        let g = w[1] - w[0];
        if g > gap.0 {
            gap = (g, w[0], w[1]);
        }
    }
    let mut lower = lo.to_vec();
    let mut upper = hi.to_vec();
    lower.push(gap.1);
    upper.push(gap.2);
    Found {
        volume: width * gap.0,
        lower,
        upper,
    }
}

/// No point lies in the open box `(lower, upper)`.
pub fn box_is_empty(points: &[f64], d: usize, lower: &[f64], upper: &[f64]) -> bool {
    points
        .chunks_exact(d)
        .all(|p| !p.iter().zip(lower).zip(upper).all(|((&x, &l), &u)| x > l && x < u))
}

/// Moving any single face outward by `eps` captures a point or leaves `[0,1]^d`.
pub fn box_is_locally_maximal(points: &[f64], d: usize, lower: &[f64], upper: &[f64], eps: f64) -> bool {
    (0..d).all(|j| {
        let down = {
            let mut l = lower.to_vec();
            l[j] -= eps;
            l[j] < 0.0 || !box_is_empty(points, d, &l, upper)
        };
        let up = {
            let mut u = upper.to_vec();
            u[j] += eps;
            u[j] > 1.0 || !box_is_empty(points, d, lower, &u)
        };
        down && up
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionRow {
    pub n: usize,
    pub disp: f64,
    pub n_disp: f64,
}

/// `(n, disp, n·disp)` for each member, in input order.
pub fn dispersion_times_n_curve(family: &[(Vec<f64>, usize)], limits: &DispersionLimits) -> Result<Vec<DispersionRow>> {
    family
        .iter()
        .map(|(pts, d)| {
            let n = pts.len() / d;
            let r = dispersion_with_limits(pts, *d, limits)?;
            Ok(DispersionRow {
                n,
                disp: r.volume,
                n_disp: n as f64 * r.volume,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_set() {
        for d in 1..=3 {
            let r = dispersion(&[], d).unwrap();
            assert_eq!(r.volume, 1.0);
            assert_eq!(r.lower, vec![0.0; d]);
            assert_eq!(r.upper, vec![1.0; d]);
        }
    }

    #[test]
    fn centre_point() {
        let r = dispersion(&[0.5, 0.5], 2).unwrap();
        assert!((r.volume - 0.5).abs() < 1e-12);
        assert!(box_is_empty(&[0.5, 0.5], 2, &r.lower, &r.upper));
        assert!(box_is_locally_maximal(&[0.5, 0.5], 2, &r.lower, &r.upper, 1e-9));
    }

    #[test]
    fn one_dimensional_grid() {
        for n in [1usize, 3, 10] {
            let pts: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
            let r = dispersion(&pts, 1).unwrap();
            assert!((r.volume - 1.0 / n as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn boundary_points_do_not_block() {
        let r = dispersion(&[0.0, 0.3, 1.0, 0.7], 2).unwrap();
        assert_eq!(r.volume, 1.0);
    }

    #[test]
    fn cap_and_input_errors() {
        let pts = vec![0.5; 30];
        let e = dispersion_with_limits(&pts, 3, &DispersionLimits { max_candidates: 10.0 }).unwrap_err();
        assert_eq!(e.exit_code(), 3);
        assert!(dispersion(&[0.5, 0.5, 0.5], 2).is_err());
        assert!(dispersion(&[1.5, 0.5], 2).is_err());
    }

    #[test]
    fn singleton_curve() {
        let rows = dispersion_times_n_curve(&[(vec![0.5, 0.5], 2)], &DispersionLimits::default()).unwrap();
        assert_eq!(rows.len(), 1);
        assert!((rows[0].n_disp - 0.5).abs() < 1e-12);
    }
}
