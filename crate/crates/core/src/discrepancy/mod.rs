//! Sup-type discrepancies of weighted point sets.
//!
//! The smooth discrepancies are suprema over kernel locations and widths.
//! They are estimated by a deterministic grid sweep followed by pattern-search
//! refinement, so every reported value is a maximum over evaluated candidates:
//! a certified lower bound on the true supremum. The star discrepancy is
//! computed exactly.

mod minimax;
mod search;
mod simplex;
mod star;

pub use minimax::{
    constraint_sample, equal_weights_objective, kernel_matrix, optimize_weights_minimax,
    sample_integrals, MinimaxLimits, MinimaxSolution, SamplePoint,
};
pub use star::{star_discrepancy_exact, StarDiscrepancy, StarLimits};

use crate::error::{Error, Result};
use crate::io::to_json_string;
use crate::pointsets::{SplitMix64, WeightedPointSet};
use search::{better, Candidate, KernelKind, Objective, ParamBounds};
use serde::{Deserialize, Serialize};

/// Discretization of the supremum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSpec {
    /// Grid points per coordinate for the location parameter.
    pub z_grid: usize,
    /// Width vectors sampled on the constraint surface (the symmetric one included).
    pub u_samples: usize,
    /// Pattern-search iterations after the grid sweep.
    pub refine_iters: usize,
    pub seed: u64,
}

impl Default for SearchSpec {
    fn default() -> Self {
        Self {
            z_grid: 64,
            u_samples: 16,
            refine_iters: 40,
            seed: 1,
        }
    }
}

impl SearchSpec {
    pub fn validate(&self) -> Result<()> {
        if self.z_grid < 2 {
            return Err(Error::arg("z_grid must be at least 2"));
        }
        if self.u_samples < 1 {
            return Err(Error::arg("u_samples must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    FixedVolume,
    PeriodicFixedVolume,
    Global,
    Star,
    BR,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    #[default]
    Native,
    Equal,
    Optimized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    /// Maximum over evaluated candidates (a lower bound on the supremum).
    pub value: f64,
    /// Shift `z` (periodic), box centre `x⁰` (fixed volume), anchor `t` (B_r) or corner `b` (star).
    pub argmax_z: Vec<f64>,
    /// Widths at the maximum; empty for star and B_r.
    pub argmax_u: Vec<f64>,
    /// Constraint value `v` (periodic) or `V` (fixed volume) at the maximum.
    pub volume: Option<f64>,
    pub r: u32,
    pub mode: Mode,
    pub weight_mode: WeightMode,
    pub search: Option<SearchSpec>,
    pub d: usize,
    pub m: usize,
    pub evaluations: u64,
}

impl DiscrepancyReport {
    pub fn with_weight_mode(mut self, mode: WeightMode) -> Self {
        self.weight_mode = mode;
        self
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(to_json_string(self)?)
    }
}

/// Width vectors with `∏ u_j = prod`, `u_j <= u_max`.
///
/// The first sample is symmetric (`u_j = prod^{1/d}`). Further samples set
/// `ln u_j = ln u_max - f_j` where `f` is the slack `d ln u_max - ln prod`
/// split by sorted-uniform spacings from a SplitMix64 stream, so a larger
/// `count` with the same seed extends the same sequence. Exact duplicates
/// (e.g. in one dimension) are dropped.
pub fn sample_widths(d: usize, prod: f64, u_max: f64, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if d == 0 || count == 0 {
        return Err(Error::arg("need d >= 1 and at least one width sample"));
    }
    let slack = d as f64 * u_max.ln() - prod.ln();
    if !(prod > 0.0) || slack < -1e-12 {
        return Err(Error::arg(format!(
            "width product {prod} not attainable with u_j <= {u_max} in dimension {d}"
        )));
    }
    let slack = slack.max(0.0);
    let sym = prod.powf(1.0 / d as f64).min(u_max);
    let mut out = vec![vec![sym; d]];
    let mut rng = SplitMix64::new(seed);
    let mut cuts = vec![0.0; d + 1];
    for _ in 1..count {
        cuts[0] = 0.0;
        cuts[d] = 1.0;
        for c in cuts.iter_mut().take(d).skip(1) {
            *c = rng.next_f64();
        }
        cuts[1..d].sort_by(f64::total_cmp);
        let u: Vec<f64> = (0..d)
            .map(|j| (u_max.ln() - slack * (cuts[j + 1] - cuts[j])).exp().min(u_max))
            .collect();
        if !out.contains(&u) {
            out.push(u);
        }
    }
    Ok(out)
}

fn periodic_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / n as f64).collect()
}

fn closed_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

fn anchor_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64 / n as f64).collect()
}

fn run_search(
    obj: &Objective,
    grid: &[f64],
    widths: &[Vec<f64>],
    search: &SearchSpec,
    bounds: ParamBounds,
    step_log: f64,
) -> (Candidate, u64) {
    let mut best: Option<Candidate> = None;
    let mut evals = 0u64;
    let per_u = (grid.len() as u64).pow(obj.dim() as u32);
    for u in widths {
        let c = obj.sweep(grid, u);
        evals += per_u;
        if best.as_ref().map_or(true, |b| better(&c, b)) {
            best = Some(c);
        }
    }
    let start = best.expect("at least one width sample");
    let step_t = if bounds.periodic {
        1.0 / grid.len() as f64
    } else {
        1.0 / (grid.len() - 1) as f64
    };
    let (best, more) = obj.refine(start, search.refine_iters, step_t, step_log, bounds);
    (best, evals + more)
}

/// `r`-smooth fixed-volume discrepancy over boxes
/// `B = ∏ [x⁰_j - r u_j/2, x⁰_j + r u_j/2) ⊂ [0,1)^d` of volume
/// `r^d pr(u) = V`, with `u_j <= min(1/2, 1/r)`.
pub fn fixed_volume_discrepancy(
    ps: &WeightedPointSet,
    r: u32,
    volume: f64,
    search: &SearchSpec,
) -> Result<DiscrepancyReport> {
    search.validate()?;
    if r == 0 {
        return Err(Error::arg("r must be at least 1"));
    }
    let d = ps.dim();
    let u_max = (1.0 / f64::from(r)).min(0.5);
    let v_max = (f64::from(r) * u_max).powi(d as i32);
    if !(volume > 0.0 && volume <= v_max) {
        return Err(Error::arg(format!(
            "box volume V = {volume} outside (0, {v_max}] for r = {r}, d = {d}"
        )));
    }
    let prod = volume / f64::from(r).powi(d as i32);
    let widths = sample_widths(d, prod, u_max, search.u_samples, search.seed)?;
    let obj = Objective::new(ps, KernelKind::Box { r });
    let grid = closed_grid(search.z_grid);
    let bounds = ParamBounds {
        periodic: false,
        t_min: 0.0,
        t_max: 1.0,
        u_max,
    };
    let step_log = log_step(d, prod, u_max, search.u_samples);
    let (best, evals) = run_search(&obj, &grid, &widths, search, bounds, step_log);
    Ok(report(best, Some(volume), r, Mode::FixedVolume, Some(*search), ps, evals))
}

/// Periodic fixed-volume discrepancy: sup over `z ∈ [0,1)^d` and
/// `u ∈ (0,1/2]^d` with `pr(u) = v` of `|pr(u)^r - Σ λ_μ h̃^r(ξ^μ, z, u)|`.
pub fn periodic_fixed_volume_discrepancy(
    ps: &WeightedPointSet,
    r: u32,
    v: f64,
    search: &SearchSpec,
) -> Result<DiscrepancyReport> {
    search.validate()?;
    if r == 0 {
        return Err(Error::arg("r must be at least 1"));
    }
    let d = ps.dim();
    let v_max = 0.5f64.powi(d as i32);
    if !(v > 0.0 && v <= v_max) {
        return Err(Error::arg(format!("volume v = {v} outside (0, 2^-{d}]")));
    }
    let widths = sample_widths(d, v, 0.5, search.u_samples, search.seed)?;
    let obj = Objective::new(ps, KernelKind::Periodic { r });
    let grid = periodic_grid(search.z_grid);
    let bounds = ParamBounds {
        periodic: true,
        t_min: 0.0,
        t_max: 1.0,
        u_max: 0.5,
    };
    let step_log = log_step(d, v, 0.5, search.u_samples);
    let (best, evals) = run_search(&obj, &grid, &widths, search, bounds, step_log);
    Ok(report(best, Some(v), r, Mode::PeriodicFixedVolume, Some(*search), ps, evals))
}

/// Maximum of the periodic fixed-volume discrepancy over `v_grid`; the
/// report's `volume` is the maximizing `v` (first one on ties).
pub fn global_smooth_discrepancy(
    ps: &WeightedPointSet,
    r: u32,
    search: &SearchSpec,
    v_grid: &[f64],
) -> Result<DiscrepancyReport> {
    if v_grid.is_empty() {
        return Err(Error::arg("volume grid is empty"));
    }
    let mut best: Option<DiscrepancyReport> = None;
    let mut evals = 0;
    for &v in v_grid {
        let rep = periodic_fixed_volume_discrepancy(ps, r, v, search)?;
        evals += rep.evaluations;
        if best.as_ref().map_or(true, |b| rep.value > b.value) {
            best = Some(rep);
        }
    }
    let mut best = best.expect("nonempty grid");
    best.mode = Mode::Global;
    best.evaluations = evals;
    Ok(best)
}

/// `r`-discrepancy `sup_{t ∈ (0,1]^d} |Σ λ_μ B_r(t, ξ^μ) - ∏ t_j^r / r!|` with
/// `B_r(t, x) = ∏ (t_j - x_j)_+^{r-1} / (r-1)!`; for `r = 1` the factor is
/// the indicator of `t_j > x_j`.
pub fn b_r_discrepancy(ps: &WeightedPointSet, r: u32, search: &SearchSpec) -> Result<DiscrepancyReport> {
    search.validate()?;
    if r == 0 {
        return Err(Error::arg("r must be at least 1"));
    }
    let obj = Objective::new(ps, KernelKind::Anchored { r });
    let grid = anchor_grid(search.z_grid);
    let bounds = ParamBounds {
        periodic: false,
        t_min: f64::MIN_POSITIVE,
        t_max: 1.0,
        u_max: 0.5,
    };
    let (best, evals) = run_search(&obj, &grid, &[Vec::new()], search, bounds, 0.0);
    Ok(report(best, None, r, Mode::BR, Some(*search), ps, evals))
}

/// Evaluates the periodic objective at one `(z, u)`.
pub fn periodic_objective(ps: &WeightedPointSet, r: u32, z: &[f64], u: &[f64]) -> f64 {
    Objective::new(ps, KernelKind::Periodic { r }).eval_at(z, u)
}

/// Evaluates the fixed-volume objective at box centre `x0` and widths `u`.
pub fn box_objective(ps: &WeightedPointSet, r: u32, x0: &[f64], u: &[f64]) -> f64 {
    Objective::new(ps, KernelKind::Box { r }).eval_at(x0, u)
}

/// Evaluates the `B_r` objective at anchor `t`.
pub fn b_r_objective(ps: &WeightedPointSet, r: u32, t: &[f64]) -> f64 {
    Objective::new(ps, KernelKind::Anchored { r }).eval_at(t, &[])
}

fn log_step(d: usize, prod: f64, u_max: f64, samples: usize) -> f64 {
    if d < 2 {
        return 0.0;
    }
    let slack = (d as f64 * u_max.ln() - prod.ln()).max(0.0);
    slack / (2.0 * samples as f64).max(2.0)
}

fn report(
    best: Candidate,
    volume: Option<f64>,
    r: u32,
    mode: Mode,
    search: Option<SearchSpec>,
    ps: &WeightedPointSet,
    evaluations: u64,
) -> DiscrepancyReport {
    DiscrepancyReport {
        value: best.value,
        argmax_z: best.z,
        argmax_u: best.u,
        volume,
        r,
        mode,
        weight_mode: WeightMode::Native,
        search,
        d: ps.dim(),
        m: ps.len(),
        evaluations,
    }
}
