//! Experiment orchestration: point-set families, rate sweeps, fixed-volume
//! curves and lattice self-checks.

use crate::config::Config;
use crate::discrepancy::{
    b_r_discrepancy, fixed_volume_discrepancy, global_smooth_discrepancy,
    periodic_fixed_volume_discrepancy, star_discrepancy_exact, DiscrepancyReport, Mode, SearchSpec,
    StarLimits, WeightMode,
};
use crate::error::{Error, Result};
use crate::io::fmt17;
use crate::lattice::{min_block_order, AdmissibleLattice, AxisBox, DyadicBlock, EnumerationLimits};
use crate::pointsets::{
    fibonacci_pointset, frolov_pointset, periodized_frolov_pointset, random_pointset, SplitMix64,
    WeightedPointSet,
};
use crate::rates::{fit_rate, RateFit};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Frolov,
    FrolovPeriodized,
    Fibonacci,
    Random,
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "frolov" => Ok(Family::Frolov),
            "frolov-periodized" => Ok(Family::FrolovPeriodized),
            "fibonacci" => Ok(Family::Fibonacci),
            "random" => Ok(Family::Random),
            _ => Err(Error::arg(format!(
                "unknown family {s:?} (expected frolov, frolov-periodized, fibonacci, random)"
            ))),
        }
    }
}

/// One member of a point-set family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SetParams {
    pub family: Family,
    pub d: usize,
    /// Lattice scale for the Frolov families.
    pub a: f64,
    /// Fibonacci index.
    pub n: u32,
    /// Size of a random set.
    pub m: usize,
    pub seed: u64,
}

impl SetParams {
    pub fn frolov(d: usize, a: f64) -> Self {
        Self::with(Family::Frolov, d, a, 0, 0, 0)
    }

    pub fn frolov_periodized(d: usize, a: f64) -> Self {
        Self::with(Family::FrolovPeriodized, d, a, 0, 0, 0)
    }

    pub fn fibonacci(n: u32) -> Self {
        Self::with(Family::Fibonacci, 2, 0.0, n, 0, 0)
    }

    pub fn random(m: usize, d: usize, seed: u64) -> Self {
        Self::with(Family::Random, d, 0.0, 0, m, seed)
    }

    fn with(family: Family, d: usize, a: f64, n: u32, m: usize, seed: u64) -> Self {
        Self {
            family,
            d,
            a,
            n,
            m,
            seed,
        }
    }

    /// The parameter that varies along a family.
    pub fn label(&self) -> f64 {
        match self.family {
            Family::Frolov | Family::FrolovPeriodized => self.a,
            Family::Fibonacci => f64::from(self.n),
            Family::Random => self.m as f64,
        }
    }

    pub fn build(&self, limits: &EnumerationLimits) -> Result<WeightedPointSet> {
        match self.family {
            Family::Frolov => frolov_pointset(&AdmissibleLattice::frolov(self.d, self.a)?, limits),
            Family::FrolovPeriodized => {
                periodized_frolov_pointset(&AdmissibleLattice::frolov(self.d, self.a)?, limits)
            }
            Family::Fibonacci => fibonacci_pointset(self.n),
            Family::Random => random_pointset(self.m, self.d, self.seed),
        }
    }
}

/// Members listed by a config: `family`, `d`, and the list key `a`, `n` or `m`.
pub fn family_from_config(cfg: &Config) -> Result<Vec<SetParams>> {
    let family: Family = cfg.require("family")?.parse()?;
    let d = cfg.parsed_or("d", 2usize)?;
    let seed = cfg.parsed_or("seed", 1u64)?;
    let missing = |k: &str| Error::arg(format!("family {family:?} needs a list key {k:?}"));
    let out: Vec<SetParams> = match family {
        Family::Frolov | Family::FrolovPeriodized => cfg
            .list::<f64>("a")?
            .ok_or_else(|| missing("a"))?
            .into_iter()
            .map(|a| SetParams::with(family, d, a, 0, 0, 0))
            .collect(),
        Family::Fibonacci => cfg
            .list::<u32>("n")?
            .ok_or_else(|| missing("n"))?
            .into_iter()
            .map(SetParams::fibonacci)
            .collect(),
        Family::Random => cfg
            .list::<usize>("m")?
            .ok_or_else(|| missing("m"))?
            .into_iter()
            .map(|m| SetParams::random(m, d, seed))
            .collect(),
    };
    if out.is_empty() {
        return Err(Error::arg("family has no members"));
    }
    Ok(out)
}

/// Weights used when measuring a set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightChoice {
    Native,
    Equal,
    Zero,
}

impl FromStr for WeightChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "native" => Ok(Self::Native),
            "equal" => Ok(Self::Equal),
            "zero" => Ok(Self::Zero),
            _ => Err(Error::arg(format!("unknown weight choice {s:?}"))),
        }
    }
}

impl WeightChoice {
    pub fn apply(&self, ps: &WeightedPointSet) -> Result<WeightedPointSet> {
        match self {
            Self::Native => Ok(ps.clone()),
            Self::Equal => Ok(ps.with_equal_weights()),
            Self::Zero => ps.with_weights(vec![0.0; ps.len()]),
        }
    }

    fn report_mode(&self) -> WeightMode {
        match self {
            Self::Equal => WeightMode::Equal,
            _ => WeightMode::Native,
        }
    }
}

/// Discrepancy to measure on each set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    pub mode: Mode,
    pub r: u32,
    /// `v` for the periodic modes, `V` for fixed volume.
    pub volume: Option<f64>,
    pub v_grid: Vec<f64>,
    pub search: SearchSpec,
    pub weights: WeightChoice,
}

pub fn parse_mode(s: &str) -> Result<Mode> {
    match s {
        "fixed_volume" | "fixed-volume" => Ok(Mode::FixedVolume),
        "periodic" | "periodic_fixed_volume" => Ok(Mode::PeriodicFixedVolume),
        "global" => Ok(Mode::Global),
        "star" => Ok(Mode::Star),
        "b_r" | "br" => Ok(Mode::BR),
        _ => Err(Error::arg(format!(
            "unknown mode {s:?} (expected fixed_volume, periodic, global, star, b_r)"
        ))),
    }
}

impl Measure {
    pub fn from_config(cfg: &Config) -> Result<Self> {
        let defaults = SearchSpec::default();
        Ok(Self {
            mode: parse_mode(cfg.require("mode")?)?,
            r: cfg.parsed_or("r", 2)?,
            volume: cfg.parsed("v")?,
            v_grid: cfg.list("v_grid")?.unwrap_or_default(),
            search: SearchSpec {
                z_grid: cfg.parsed_or("z_grid", defaults.z_grid)?,
                u_samples: cfg.parsed_or("u_samples", defaults.u_samples)?,
                refine_iters: cfg.parsed_or("refine_iters", defaults.refine_iters)?,
                seed: cfg.parsed_or("seed", defaults.seed)?,
            },
            weights: cfg.parsed_or("weights", WeightChoice::Native)?,
        })
    }

    fn volume(&self) -> Result<f64> {
        self.volume
            .ok_or_else(|| Error::arg("this mode needs a volume v"))
    }

    pub fn run(&self, ps: &WeightedPointSet) -> Result<DiscrepancyReport> {
        let ps = self.weights.apply(ps)?;
        let rep = match self.mode {
            Mode::FixedVolume => fixed_volume_discrepancy(&ps, self.r, self.volume()?, &self.search)?,
            Mode::PeriodicFixedVolume => {
                periodic_fixed_volume_discrepancy(&ps, self.r, self.volume()?, &self.search)?
            }
            Mode::Global => global_smooth_discrepancy(&ps, self.r, &self.search, &self.v_grid)?,
            Mode::BR => b_r_discrepancy(&ps, self.r, &self.search)?,
            Mode::Star => star_report(&ps)?,
        };
        Ok(rep.with_weight_mode(self.weights.report_mode()))
    }
}

/// Exact star discrepancy packaged as a report.
pub fn star_report(ps: &WeightedPointSet) -> Result<DiscrepancyReport> {
    let s = star_discrepancy_exact(ps, &StarLimits::default())?;
    Ok(DiscrepancyReport {
        value: s.value,
        argmax_z: s.corner,
        argmax_u: Vec::new(),
        volume: None,
        r: 1,
        mode: Mode::Star,
        weight_mode: WeightMode::Native,
        search: None,
        d: ps.dim(),
        m: ps.len(),
        evaluations: (ps.len() as u64 + 1).pow(ps.dim() as u32),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub param: f64,
    pub m: usize,
    pub value: f64,
}

#[derive(Debug)]
pub struct RatesOutput {
    pub rows: Vec<RateRow>,
    pub fit: Option<RateFit>,
    /// First member failure; rows before it are kept.
    pub failure: Option<Error>,
}

impl RatesOutput {
    /// CSV with a provenance header and the fit as trailing comments.
    pub fn to_csv(&self, config_hash: &str, seed: u64) -> String {
        let mut s = format!("# config_sha256={config_hash}\n# seed={seed}\nparam,m,value\n");
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{}", fmt17(r.param), r.m, fmt17(r.value));
        }
        if let Some(f) = &self.fit {
            let _ = writeln!(
                s,
                "# slope={} intercept={} residual_rms={}",
                fmt17(f.slope),
                fmt17(f.intercept),
                fmt17(f.residual_rms)
            );
        }
        if let Some(e) = &self.failure {
            let _ = writeln!(s, "# failed: {e}");
        }
        s
    }
}

/// Measures every member (in parallel, output in member order) and fits
/// `ln value` against `ln m`. Stops at the first failing member.
pub fn rates(members: &[SetParams], measure: &Measure, limits: &EnumerationLimits) -> RatesOutput {
    let results: Vec<Result<RateRow>> = members
        .par_iter()
        .map(|p| {
            let ps = p.build(limits)?;
            let rep = measure.run(&ps)?;
            Ok(RateRow {
                param: p.label(),
                m: ps.len(),
                value: rep.value,
            })
        })
        .collect();
    let mut rows = Vec::new();
    let mut failure = None;
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    let fit = if rows.len() >= 3 {
        let xs: Vec<f64> = rows.iter().map(|r| r.m as f64).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.value).collect();
        fit_rate(&xs, &ys).ok()
    } else {
        None
    };
    RatesOutput { rows, fit, failure }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub v: f64,
    pub value: f64,
    /// `value(v) / value(previous v)`.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedVolumeCurve {
    pub rows: Vec<CurveRow>,
    /// Smallest grid volume.
    pub v0: f64,
    /// Discrepancy at `v0`.
    pub base: f64,
    /// Smallest `C` with `value <= C · base · ln(2v/v0)^{d-1}` on the grid.
    pub fitted_c: Option<f64>,
}

impl FixedVolumeCurve {
    pub fn to_csv(&self, config_hash: &str, seed: u64) -> String {
        let mut s = format!("# config_sha256={config_hash}\n# seed={seed}\nv,value,ratio\n");
        for r in &self.rows {
            let ratio = r.ratio.map(fmt17).unwrap_or_default();
            let _ = writeln!(s, "{},{},{}", fmt17(r.v), fmt17(r.value), ratio);
        }
        let _ = writeln!(s, "# v0={} base={}", fmt17(self.v0), fmt17(self.base));
        if let Some(c) = self.fitted_c {
            let _ = writeln!(s, "# fitted_c={}", fmt17(c));
        }
        s
    }
}

/// Periodic fixed-volume discrepancy along an increasing volume grid.
pub fn fixed_volume_curve(
    ps: &WeightedPointSet,
    r: u32,
    v_grid: &[f64],
    search: &SearchSpec,
) -> Result<FixedVolumeCurve> {
    if v_grid.is_empty() {
        return Err(Error::arg("volume grid is empty"));
    }
    if v_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::arg("volume grid must be strictly increasing"));
    }
    let values = v_grid
        .par_iter()
        .map(|&v| periodic_fixed_volume_discrepancy(ps, r, v, search).map(|rep| rep.value))
        .collect::<Result<Vec<f64>>>()?;
    let rows: Vec<CurveRow> = v_grid
        .iter()
        .zip(&values)
        .enumerate()
        .map(|(i, (&v, &value))| CurveRow {
            v,
            value,
            ratio: (i > 0).then(|| value / values[i - 1]),
        })
        .collect();
    let v0 = v_grid[0];
    let base = values[0];
    let dm1 = ps.dim() as i32 - 1;
    let fitted_c = (rows.len() > 1 && base > 0.0).then(|| {
        rows.iter()
            .map(|row| row.value / (base * (2.0 * row.v / v0).ln().powi(dm1)))
            .fold(0.0, f64::max)
    });
    Ok(FixedVolumeCurve {
        rows,
        v0,
        base,
        fitted_c,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockRow {
    /// `‖s‖₁`.
    pub order: u32,
    pub blocks: usize,
    /// Largest count over blocks of this order.
    pub max_count: u64,
    /// `max_count / 2^{order - n0}`.
    pub constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeCheck {
    pub d: usize,
    pub a: f64,
    pub radius: i64,
    pub min_norm_form: f64,
    pub argmin: Vec<i64>,
    pub boxes: usize,
    /// Largest `count - (vol + 1)` over the random boxes.
    pub worst_box_excess: f64,
    pub n0: u32,
    pub blocks: Vec<BlockRow>,
    pub empty_below_n0: bool,
    pub pass: bool,
}

/// Random boxes with log-uniform side lengths (volumes roughly `1e-2 .. 1e2`)
/// and corners in `[-4, 4]^d`.
pub fn random_boxes(d: usize, count: usize, seed: u64) -> Vec<AxisBox> {
    let mut rng = SplitMix64::new(seed);
    (0..count)
        .map(|_| {
            let log_vol = (rng.next_f64() * 4.0 - 2.0) * std::f64::consts::LN_10;
            let mut cuts: Vec<f64> = (0..d).map(|_| rng.next_f64()).collect();
            let total: f64 = cuts.iter().sum();
            for c in &mut cuts {
                *c /= total;
            }
            let lo: Vec<f64> = (0..d).map(|_| rng.next_f64() * 8.0 - 4.0).collect();
            let hi: Vec<f64> = lo.iter().zip(&cuts).map(|(l, c)| l + (log_vol * c).exp()).collect();
            AxisBox::new(lo, hi).expect("finite ordered corners")
        })
        .collect()
}

/// Norm-form minimum, box counts and dyadic-block counts for one lattice.
pub fn verify_lattice(
    d: usize,
    a: f64,
    radius: i64,
    boxes: usize,
    extra_orders: u32,
    seed: u64,
    limits: &EnumerationLimits,
) -> Result<LatticeCheck> {
    let lat = AdmissibleLattice::frolov(d, a)?;
    let nf = lat.norm_form_min(radius, limits)?;
    let worst = random_boxes(d, boxes, seed)
        .par_iter()
        .map(|b| Ok(lat.box_point_count(b, limits)? as f64 - (b.volume() + 1.0)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let n0 = min_block_order(d, a);
    let mut blocks = Vec::new();
    let mut empty_below = true;
    for order in 0..=n0 + extra_orders {
        let mut counts = Vec::new();
        for_each_composition(order, d, &mut |s| counts.push(s.to_vec()));
        let found = counts
            .par_iter()
            .map(|s| lat.count_points_in_dyadic_block(&DyadicBlock::new(s.clone()), limits))
            .collect::<Result<Vec<u64>>>()?;
        let max_count = found.iter().copied().max().unwrap_or(0);
        if order < n0 && max_count > 0 {
            empty_below = false;
        }
        blocks.push(BlockRow {
            order,
            blocks: found.len(),
            max_count,
            constant: max_count as f64 / 2f64.powi(order as i32 - n0 as i32),
        });
    }
    let pass = nf.value >= 1.0 - 1e-6 && worst <= 1e-9 && empty_below;
    Ok(LatticeCheck {
        d,
        a,
        radius,
        min_norm_form: nf.value,
        argmin: nf.argmin,
        boxes,
        worst_box_excess: worst,
        n0,
        blocks,
        empty_below_n0: empty_below,
        pass,
    })
}

/// Nonnegative integer vectors of length `d` summing to `n`.
fn for_each_composition(n: u32, d: usize, f: &mut impl FnMut(&[u32])) {
    fn go(rest: u32, j: usize, cur: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
        if j + 1 == cur.len() {
            cur[j] = rest;
            f(cur);
            return;
        }
        for k in 0..=rest {
            cur[j] = k;
            go(rest - k, j + 1, cur, f);
        }
    }
    let mut cur = vec![0; d];
    go(n, 0, &mut cur, f);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compositions_are_counted() {
        let mut n = 0;
        for_each_composition(4, 3, &mut |s| {
            assert_eq!(s.iter().sum::<u32>(), 4);
            n += 1;
        });
        assert_eq!(n, 15);
    }

    #[test]
    fn zero_weight_family_has_flat_rate() {
        let cfg = Config::parse(
            "family = fibonacci\nn = 5,6,7,8\nmode = periodic\nr = 2\nv = 0.25\nweights = zero\nz_grid = 4\nu_samples = 1\nrefine_iters = 0\n",
        )
        .unwrap();
        let out = rates(
            &family_from_config(&cfg).unwrap(),
            &Measure::from_config(&cfg).unwrap(),
            &EnumerationLimits::default(),
        );
        assert!(out.failure.is_none());
        assert!(out.rows.iter().all(|r| r.value == 0.0625));
        assert_eq!(out.fit.unwrap().slope, 0.0);
    }

    #[test]
    fn failing_member_keeps_partial_rows() {
        let members = [SetParams::fibonacci(5), SetParams::fibonacci(6), SetParams::fibonacci(1)];
        let m = Measure {
            mode: Mode::Star,
            r: 1,
            volume: None,
            v_grid: vec![],
            search: SearchSpec::default(),
            weights: WeightChoice::Native,
        };
        let out = rates(&members, &m, &EnumerationLimits::default());
        assert_eq!(out.rows.len(), 2);
        assert!(out.failure.is_some());
        assert!(out.to_csv("h", 1).contains("# failed"));
    }

    #[test]
    fn single_volume_curve() {
        let ps = fibonacci_pointset(8).unwrap();
        let c = fixed_volume_curve(&ps, 2, &[0.1], &SearchSpec::default()).unwrap();
        assert_eq!(c.rows.len(), 1);
        assert!(c.fitted_c.is_none());
        assert!(fixed_volume_curve(&ps, 2, &[0.1, 0.05], &SearchSpec::default()).is_err());
    }

    #[test]
    fn small_lattice_check_passes() {
        let chk = verify_lattice(2, 4.0, 10, 50, 2, 1, &EnumerationLimits::default()).unwrap();
        assert!(chk.pass, "{chk:?}");
        assert_eq!(chk.blocks.len() as u32, chk.n0 + 3);
    }
}
