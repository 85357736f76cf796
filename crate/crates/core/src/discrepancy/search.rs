//! Grid sweep plus coordinate pattern search for the sup-type discrepancies.
//!
//! A candidate is a parameter vector `t ∈ [0,1]^d` (mapped to a shift, box
//! centre or anchor depending on the kernel) and a width vector `u` on the
//! constraint surface `pr(u) = const`. The grid sweep and the direct
//! objective evaluate the same floating-point expression in the same order,
//! so a reported value is reproduced bit for bit at its argmax.

use crate::kernels::Hat;
use crate::pointsets::WeightedPointSet;
use crate::sum::NeumaierSum;
use rayon::prelude::*;
use std::cmp::Ordering;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum KernelKind {
    /// `∏ h̃^r(x_j - z_j, u_j)` with `z = t`, shifts wrap modulo 1.
    Periodic { r: u32 },
    /// `∏ h^r(x_j - z_j, u_j)` with box centre `z_j = r u_j/2 + t_j (1 - r u_j)`.
    Box { r: u32 },
    /// `∏ (t_j - x_j)_+^{r-1}/(r-1)!` anchored at `t ∈ (0,1]^d`; no widths.
    Anchored { r: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Candidate {
    pub value: f64,
    pub t: Vec<f64>,
    pub z: Vec<f64>,
    pub u: Vec<f64>,
}

/// Larger value wins; ties go to the lexicographically smallest `(z, u)`.
pub(crate) fn better(a: &Candidate, b: &Candidate) -> bool {
    match a.value.total_cmp(&b.value) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => lex(&a.z, &b.z).then_with(|| lex(&a.u, &b.u)) == Ordering::Less,
    }
}

fn lex(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

pub(crate) struct Objective<'a> {
    ps: &'a WeightedPointSet,
    kind: KernelKind,
    anchored_norm: f64,
}

impl<'a> Objective<'a> {
    pub fn new(ps: &'a WeightedPointSet, kind: KernelKind) -> Self {
        let anchored_norm = match kind {
            KernelKind::Anchored { r } => 1.0 / (1..r).map(f64::from).product::<f64>(),
            _ => 1.0,
        };
        Self {
            ps,
            kind,
            anchored_norm,
        }
    }

    pub fn dim(&self) -> usize {
        self.ps.dim()
    }

    fn hats(&self, u: &[f64]) -> Vec<Hat> {
        match self.kind {
            KernelKind::Periodic { r } | KernelKind::Box { r } => u
                .iter()
                .map(|&uj| Hat::new(r, uj).expect("widths checked by caller"))
                .collect(),
            KernelKind::Anchored { .. } => Vec::new(),
        }
    }

    /// Maps a parameter vector to the kernel location.
    pub fn location(&self, t: &[f64], u: &[f64]) -> Vec<f64> {
        match self.kind {
            KernelKind::Periodic { .. } | KernelKind::Anchored { .. } => t.to_vec(),
            KernelKind::Box { r } => t
                .iter()
                .zip(u)
                .map(|(&tj, &uj)| {
                    let w = f64::from(r) * uj;
                    0.5 * w + tj * (1.0 - w)
                })
                .collect(),
        }
    }

    #[inline]
    fn coord(&self, hats: &[Hat], j: usize, x: f64, z: f64) -> f64 {
        match self.kind {
            KernelKind::Periodic { .. } => hats[j].eval_periodic(x - z),
            KernelKind::Box { .. } => hats[j].eval(x - z),
            KernelKind::Anchored { r } => {
                let s = z - x;
                if s <= 0.0 {
                    0.0
                } else if r == 1 {
                    1.0
                } else {
                    s.powi(r as i32 - 1) * self.anchored_norm
                }
            }
        }
    }

    /// Exact integral of the test kernel.
    pub fn target(&self, z: &[f64], u: &[f64]) -> f64 {
        match self.kind {
            KernelKind::Periodic { r } | KernelKind::Box { r } => {
                u.iter().map(|x| x.powi(r as i32)).product()
            }
            KernelKind::Anchored { r } => {
                let fact: f64 = (1..=r).map(f64::from).product();
                z.iter().map(|x| x.powi(r as i32) / fact).product()
            }
        }
    }

    /// `|target - Σ_μ λ_μ ∏_j k_j(ξ^μ_j)|` at kernel location `z`.
    pub fn eval_at(&self, z: &[f64], u: &[f64]) -> f64 {
        let hats = self.hats(u);
        let mut acc = NeumaierSum::new();
        for (p, &w) in self.ps.points().zip(self.ps.weights()) {
            let mut prod = 1.0;
            for (j, (&x, &zj)) in p.iter().zip(z).enumerate() {
                prod *= self.coord(&hats, j, x, zj);
            }
            acc.add(w * prod);
        }
        (self.target(z, u) - acc.value()).abs()
    }

    pub fn candidate(&self, t: Vec<f64>, u: Vec<f64>) -> Candidate {
        let z = self.location(&t, &u);
        let value = self.eval_at(&z, &u);
        Candidate { value, t, z, u }
    }

    /// Sweeps the product grid `grid^d` for a fixed `u`.
    pub fn sweep(&self, grid: &[f64], u: &[f64]) -> Candidate {
        let d = self.ps.dim();
        let m = self.ps.len();
        let g = grid.len();
        let hats = self.hats(u);
        // locations per coordinate and grid index
        let locs: Vec<Vec<f64>> = (0..d)
            .map(|j| {
                grid.iter()
                    .map(|&t| match self.kind {
                        KernelKind::Box { r } => {
                            let w = f64::from(r) * u[j];
                            0.5 * w + t * (1.0 - w)
                        }
                        _ => t,
                    })
                    .collect()
            })
            .collect();
        // table[j][gi * m + μ]
        let coords = self.ps.coords();
        let table: Vec<Vec<f64>> = (0..d)
            .map(|j| {
                let mut v = Vec::with_capacity(g * m);
                for &zj in &locs[j] {
                    for mu in 0..m {
                        v.push(self.coord(&hats, j, coords[mu * d + j], zj));
                    }
                }
                v
            })
            .collect();
        let weights = self.ps.weights();
        let total = g.pow(d as u32);
        let best = (0..total)
            .into_par_iter()
            .map(|flat| {
                let mut idx = vec![0usize; d];
                let mut rest = flat;
                for j in (0..d).rev() {
                    idx[j] = rest % g;
                    rest /= g;
                }
                let mut acc = NeumaierSum::new();
                for (mu, &w) in weights.iter().enumerate() {
                    let mut prod = 1.0;
                    for j in 0..d {
                        prod *= table[j][idx[j] * m + mu];
                    }
                    acc.add(w * prod);
                }
                let t: Vec<f64> = idx.iter().map(|&i| grid[i]).collect();
                let z: Vec<f64> = idx.iter().enumerate().map(|(j, &i)| locs[j][i]).collect();
                let value = (self.target(&z, u) - acc.value()).abs();
                Candidate {
                    value,
                    t,
                    z,
                    u: u.to_vec(),
                }
            })
            .reduce_with(|a, b| if better(&b, &a) { b } else { a });
        best.expect("grid is nonempty")
    }

    /// Steepest-ascent pattern search. Moves each location parameter by
    /// `±step_t` and transfers `±step_log` of log-width between coordinate
    /// pairs (preserving `pr(u)`); halves the steps when no move improves.
    /// Runs exactly `iters` iterations and only accepts strict improvements.
    pub fn refine(
        &self,
        start: Candidate,
        iters: usize,
        step_t: f64,
        step_log: f64,
        bounds: ParamBounds,
    ) -> (Candidate, u64) {
        let d = start.t.len();
        let mut best = start;
        let mut st = step_t;
        let mut sl = step_log;
        let mut evals = 0u64;
        for _ in 0..iters {
            let mut improved: Option<Candidate> = None;
            let consider = |c: Candidate, improved: &mut Option<Candidate>| {
                let cur = improved.as_ref().unwrap_or(&best);
                if c.value > cur.value || (c.value == cur.value && improved.is_some() && better(&c, cur)) {
                    *improved = Some(c);
                }
            };
            for j in 0..d {
                for sign in [-1.0, 1.0] {
                    let mut t = best.t.clone();
                    t[j] = bounds.apply_t(t[j] + sign * st);
                    if t[j] == best.t[j] {
                        continue;
                    }
                    evals += 1;
                    consider(self.candidate(t, best.u.clone()), &mut improved);
                }
            }
            if !best.u.is_empty() {
                for j in 0..d {
                    for k in j + 1..d {
                        for sign in [-1.0, 1.0] {
                            let mut u = best.u.clone();
                            u[j] = (u[j].ln() + sign * sl).exp();
                            u[k] = (u[k].ln() - sign * sl).exp();
                            if u[j] > bounds.u_max || u[k] > bounds.u_max {
                                continue;
                            }
                            evals += 1;
                            consider(self.candidate(best.t.clone(), u), &mut improved);
                        }
                    }
                }
            }
            match improved {
                Some(c) => best = c,
                None => {
                    st *= 0.5;
                    sl *= 0.5;
                }
            }
        }
        (best, evals)
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct ParamBounds {
    pub periodic: bool,
    pub t_min: f64,
    pub t_max: f64,
    pub u_max: f64,
}

impl ParamBounds {
    fn apply_t(&self, t: f64) -> f64 {
        if self.periodic {
            crate::pointsets::frac(t)
        } else {
            t.clamp(self.t_min, self.t_max)
        }
    }
}
