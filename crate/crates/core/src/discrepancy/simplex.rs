//! Dense tableau simplex for `max c·y  s.t.  A y <= b, y >= 0` with `b >= 0`.
//!
//! The slack basis is feasible, so no phase I is needed. Pivoting follows
//! Bland's rule (smallest eligible index for entering and leaving variable),
//! which rules out cycling on degenerate problems. Pivots smaller than
//! [`PIVOT_TOL`] are never taken.

/// Reduced-cost tolerance.
const EPS: f64 = 1e-11;
/// Smallest admissible pivot element.
const PIVOT_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub(crate) struct LpSolution {
    pub objective: f64,
    /// Optimal dual values, one per constraint row (reduced costs of the slacks).
    pub duals: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub(crate) enum LpOutcome {
    Optimal(LpSolution),
    Unbounded,
    /// Iteration cap reached; carries the current (dual-infeasible) iterate.
    Stalled(LpSolution),
}

pub(crate) struct Tableau {
    rows: usize,
    vars: usize,
    width: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    /// `a` is row-major `rows × vars`.
    pub fn new(a: &[f64], b: &[f64], c: &[f64]) -> Self {
        let rows = b.len();
        let vars = c.len();
        debug_assert_eq!(a.len(), rows * vars);
        debug_assert!(b.iter().all(|&x| x >= 0.0));
        let width = vars + rows + 1;
        let mut data = vec![0.0; (rows + 1) * width];
        for i in 0..rows {
            let row = &mut data[i * width..(i + 1) * width];
            row[..vars].copy_from_slice(&a[i * vars..(i + 1) * vars]);
            row[vars + i] = 1.0;
            row[width - 1] = b[i];
        }
        let obj = &mut data[rows * width..];
        for (o, &cj) in obj.iter_mut().zip(c) {
            *o = -cj;
        }
        Self {
            rows,
            vars,
            width,
            data,
            basis: (vars..vars + rows).collect(),
        }
    }

    fn obj(&self) -> &[f64] {
        &self.data[self.rows * self.width..]
    }

    fn snapshot(&self, iterations: usize) -> LpSolution {
        let obj = self.obj();
        LpSolution {
            objective: obj[self.width - 1],
            duals: obj[self.vars..self.vars + self.rows].to_vec(),
            iterations,
        }
    }

    pub fn solve(mut self, max_iter: usize) -> LpOutcome {
        let w = self.width;
        for it in 0..max_iter {
            let enter = (0..w - 1).find(|&j| self.obj()[j] < -EPS);
            let Some(enter) = enter else {
                return LpOutcome::Optimal(self.snapshot(it));
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let aij = self.data[i * w + enter];
                if aij > PIVOT_TOL {
                    let ratio = self.data[i * w + w - 1] / aij;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((l, best)) => {
                            if ratio < best - 1e-12 * best.abs().max(1.0)
                                || (ratio <= best + 1e-12 * best.abs().max(1.0)
                                    && self.basis[i] < self.basis[l])
                            {
                                Some((i, ratio))
                            } else {
                                Some((l, best))
                            }
                        }
                    };
                }
            }
            let Some((pr, _)) = leave else {
                return LpOutcome::Unbounded;
            };
            self.pivot(pr, enter);
        }
        LpOutcome::Stalled(self.snapshot(max_iter))
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let p = self.data[pr * w + pc];
        for x in &mut self.data[pr * w..(pr + 1) * w] {
            *x /= p;
        }
        let pivot_row = self.data[pr * w..(pr + 1) * w].to_vec();
        for i in 0..=self.rows {
            if i == pr {
                continue;
            }
            let f = self.data[i * w + pc];
            if f != 0.0 {
                let row = &mut self.data[i * w..(i + 1) * w];
                for (x, &q) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * q;
                }
                row[pc] = 0.0;
            }
        }
        self.basis[pr] = pc;
    }
}
