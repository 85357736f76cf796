//! Exact star discrepancy over the coordinate-induced grid.

use crate::error::{check_cap, Result};
use crate::pointsets::WeightedPointSet;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarLimits {
    /// Cap on `(m+1)^d · d`.
    pub max_work: f64,
}

impl Default for StarLimits {
    fn default() -> Self {
        Self { max_work: 1e9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarDiscrepancy {
    pub value: f64,
    /// Corner `b` at which the supremum is attained (or approached).
    pub corner: Vec<f64>,
    /// `true` when the supremum is the limit `b → corner⁺` (closed box count).
    pub closed: bool,
}

struct Best {
    value: f64,
    corner: Vec<f64>,
    closed: bool,
}

/// `sup_b |∏ b_j - #{μ : ξ^μ ∈ [0,b)}/m|` with unweighted counts.
///
/// Local maxima of the deficit `vol - count/m` sit at corners with
/// `b_j ∈ coords ∪ {1}` (open count), those of the excess at
/// `b_j ∈ coords` approached from above (closed count).
pub fn star_discrepancy_exact(ps: &WeightedPointSet, limits: &StarLimits) -> Result<StarDiscrepancy> {
    let d = ps.dim();
    let m = ps.len();
    check_cap(
        "exact star discrepancy (use a sampled estimate instead)",
        (m as f64 + 1.0).powi(d as i32) * d as f64,
        limits.max_work,
    )?;
    let coords = ps.coords();
    let mut cand: Vec<Vec<f64>> = (0..d)
        .map(|j| {
            let mut v: Vec<f64> = (0..m).map(|i| coords[i * d + j]).collect();
            v.push(1.0);
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        })
        .collect();
    // points sorted by their last coordinate so filtering keeps the order
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| coords[a * d + d - 1].total_cmp(&coords[b * d + d - 1]));
    let last = std::mem::take(&mut cand[d - 1]);
    let mut best = Best {
        value: f64::NEG_INFINITY,
        corner: vec![1.0; d],
        closed: false,
    };
    let mut corner = vec![0.0; d];
    recurse(
        coords, d, m, &cand, &last, 0, 1.0, &order, &order, &mut corner, &mut best,
    );
    Ok(StarDiscrepancy {
        value: best.value.max(0.0),
        corner: best.corner,
        closed: best.closed,
    })
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    coords: &[f64],
    d: usize,
    m: usize,
    cand: &[Vec<f64>],
    last: &[f64],
    j: usize,
    vol: f64,
    open: &[usize],
    closed: &[usize],
    corner: &mut Vec<f64>,
    best: &mut Best,
) {
    let inv_m = 1.0 / m as f64;
    if j == d - 1 {
        let mut po = 0;
        let mut pc = 0;
        for &b in last {
            while po < open.len() && coords[open[po] * d + j] < b {
                po += 1;
            }
            while pc < closed.len() && coords[closed[pc] * d + j] <= b {
                pc += 1;
            }
            let v = vol * b;
            let deficit = v - po as f64 * inv_m;
            let excess = pc as f64 * inv_m - v;
            for (val, is_closed) in [(deficit, false), (excess, true)] {
                if val > best.value {
                    corner[j] = b;
                    best.value = val;
                    best.corner = corner.clone();
                    best.closed = is_closed;
                }
            }
        }
        return;
    }
    for &b in &cand[j] {
        let o: Vec<usize> = open.iter().copied().filter(|&i| coords[i * d + j] < b).collect();
        let c: Vec<usize> = closed.iter().copied().filter(|&i| coords[i * d + j] <= b).collect();
        corner[j] = b;
        recurse(coords, d, m, cand, last, j + 1, vol * b, &o, &c, corner, best);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(d: usize, pts: &[Vec<f64>]) -> WeightedPointSet {
        WeightedPointSet::from_points(d, pts, vec![1.0; pts.len()]).unwrap()
    }

    #[test]
    fn origin_point() {
        let r = star_discrepancy_exact(&set(2, &[vec![0.0, 0.0]]), &StarLimits::default()).unwrap();
        assert_eq!(r.value, 1.0);
        assert!(r.closed);
    }

    #[test]
    fn one_dimensional_grid() {
        for m in [1usize, 2, 5, 17] {
            let pts: Vec<Vec<f64>> = (0..m).map(|i| vec![i as f64 / m as f64]).collect();
            let r = star_discrepancy_exact(&set(1, &pts), &StarLimits::default()).unwrap();
            assert!((r.value - 1.0 / m as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn centred_point_in_square() {
        // deficit 1/4 at b -> (1/2,1)·(1,1/2) is beaten by the closed excess 1 - 1/4
        let r = star_discrepancy_exact(&set(2, &[vec![0.5, 0.5]]), &StarLimits::default()).unwrap();
        assert_eq!(r.value, 0.75);
        assert_eq!(r.corner, vec![0.5, 0.5]);
    }

    #[test]
    fn cap_is_enforced() {
        let pts: Vec<Vec<f64>> = (0..50).map(|i| vec![i as f64 / 50.0; 3]).collect();
        let err = star_discrepancy_exact(&set(3, &pts), &StarLimits { max_work: 1e3 }).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }
}
