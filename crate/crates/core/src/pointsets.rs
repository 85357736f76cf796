//! Weighted point sets on `[0,1)^d`: Frolov nodes, periodized Frolov nodes
//! with window weights, Fibonacci lattices and seeded random baselines.

use crate::error::{Error, Result};
use crate::io::{fmt17, to_json_string};
use crate::kernels::window_weight;
use crate::lattice::{AdmissibleLattice, AxisBox, EnumerationLimits};
use crate::sum::compensated_sum;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointSetKind {
    Frolov,
    FrolovPeriodized,
    Fibonacci,
    Random,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSetMeta {
    pub kind: PointSetKind,
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl PointSetMeta {
    pub fn new(kind: PointSetKind) -> Self {
        Self {
            kind,
            params: BTreeMap::new(),
            seed: None,
        }
    }

    fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }
}

/// Cubature nodes `ξ^μ` with weights `λ_μ`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPointSet {
    d: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
    meta: PointSetMeta,
    pre_wrap: Option<Vec<f64>>,
}

impl WeightedPointSet {
    pub fn new(d: usize, points: Vec<f64>, weights: Vec<f64>, meta: PointSetMeta) -> Result<Self> {
        if d == 0 {
            return Err(Error::arg("point set dimension must be positive"));
        }
        if points.len() % d != 0 || points.len() / d != weights.len() {
            return Err(Error::arg(format!(
                "{} coordinates do not form {} points of dimension {d}",
                points.len(),
                weights.len()
            )));
        }
        if weights.is_empty() {
            return Err(Error::arg("point set must contain at least one point"));
        }
        if let Some(i) = points.iter().position(|x| !(0.0..1.0).contains(x)) {
            return Err(Error::arg(format!(
                "point {} has coordinate {} outside [0,1)",
                i / d,
                points[i]
            )));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_finite()) {
            return Err(Error::arg(format!("weight {i} is not finite")));
        }
        Ok(Self {
            d,
            points,
            weights,
            meta,
            pre_wrap: None,
        })
    }

    pub fn from_points(d: usize, points: &[Vec<f64>], weights: Vec<f64>) -> Result<Self> {
        if points.iter().any(|p| p.len() != d) {
            return Err(Error::arg("point dimension mismatch"));
        }
        Self::new(
            d,
            points.concat(),
            weights,
            PointSetMeta::new(PointSetKind::Custom),
        )
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.d..(i + 1) * self.d]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.d)
    }

    pub fn coords(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn meta(&self) -> &PointSetMeta {
        &self.meta
    }

    /// Pre-wrap nodes `η^μ` of a periodized set, row-major.
    pub fn pre_wrap_points(&self) -> Option<&[f64]> {
        self.pre_wrap.as_deref()
    }

    /// `Σ |λ_μ|`.
    pub fn weight_mass(&self) -> f64 {
        compensated_sum(self.weights.iter().map(|w| w.abs()))
    }

    /// `Σ λ_μ`.
    pub fn weight_sum(&self) -> f64 {
        compensated_sum(self.weights.iter().copied())
    }

    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        let mut out = Self::new(self.d, self.points.clone(), weights, self.meta.clone())?;
        out.pre_wrap = self.pre_wrap.clone();
        Ok(out)
    }

    pub fn with_equal_weights(&self) -> Self {
        let w = 1.0 / self.len() as f64;
        self.with_weights(vec![w; self.len()])
            .expect("same points, finite weights")
    }

    /// Merges nodes with identical coordinates by summing their weights.
    /// Cubature values are unchanged; pre-wrap nodes are dropped.
    pub fn merged_duplicates(&self) -> Self {
        let mut merged: BTreeMap<Vec<u64>, (usize, f64)> = BTreeMap::new();
        for (i, (p, &w)) in self.points().zip(&self.weights).enumerate() {
            let key: Vec<u64> = p.iter().map(|x| x.to_bits()).collect();
            merged.entry(key).or_insert((i, 0.0)).1 += w;
        }
        let mut rows: Vec<(usize, f64)> = merged.into_values().collect();
        rows.sort_by_key(|r| r.0);
        let points = rows.iter().flat_map(|&(i, _)| self.point(i).to_vec()).collect();
        let weights = rows.iter().map(|r| r.1).collect();
        Self::new(self.d, points, weights, self.meta.clone()).expect("subset of valid nodes")
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for j in 1..=self.d {
            let _ = write!(s, "x{j},");
        }
        s.push_str("weight\n");
        for (p, &w) in self.points().zip(&self.weights) {
            for x in p {
                s.push_str(&fmt17(*x));
                s.push(',');
            }
            s.push_str(&fmt17(w));
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "empty file".into(),
        })?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        let d = cols.len().saturating_sub(1);
        let expected: Vec<String> = (1..=d)
            .map(|j| format!("x{j}"))
            .chain(std::iter::once("weight".to_string()))
            .collect();
        if d == 0 || cols != expected {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `x1,...,xd,weight`, found `{header}`"),
            });
        }
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (idx, line) in lines {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != d + 1 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected {} fields, found {}", d + 1, fields.len()),
                });
            }
            for (j, f) in fields.iter().enumerate() {
                let v: f64 = f.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("field {} is not a number: `{f}`", j + 1),
                })?;
                if j < d {
                    if !(0.0..1.0).contains(&v) {
                        return Err(Error::Parse {
                            line: line_no,
                            message: format!("coordinate {v} outside [0,1)"),
                        });
                    }
                    points.push(v);
                } else {
                    if !v.is_finite() {
                        return Err(Error::Parse {
                            line: line_no,
                            message: "weight is not finite".into(),
                        });
                    }
                    weights.push(v);
                }
            }
        }
        if weights.is_empty() {
            return Err(Error::Parse {
                line: 2,
                message: "no points".into(),
            });
        }
        Self::new(d, points, weights, PointSetMeta::new(PointSetKind::Custom))
    }

    pub fn sidecar(&self) -> Sidecar {
        Sidecar {
            meta: self.meta.clone(),
            d: self.d,
            m: self.len(),
            weight_sum: self.weight_sum(),
            weight_mass: self.weight_mass(),
        }
    }

    /// Writes `path` (CSV) and the JSON sidecar next to it; returns the sidecar path.
    pub fn write_files(&self, path: &Path) -> Result<PathBuf> {
        std::fs::write(path, self.to_csv())?;
        let side = sidecar_path(path);
        std::fs::write(&side, to_json_string(&self.sidecar())?)?;
        Ok(side)
    }

    /// Reads a CSV file, restoring metadata from the sidecar when one exists.
    pub fn read_file(path: &Path) -> Result<Self> {
        let mut ps = Self::from_csv(&std::fs::read_to_string(path)?)?;
        let side = sidecar_path(path);
        if side.exists() {
            let car: Sidecar = serde_json::from_str(&std::fs::read_to_string(&side)?)?;
            if car.d == ps.d && car.m == ps.len() {
                ps.meta = car.meta;
            }
        }
        Ok(ps)
    }
}

/// JSON metadata written next to a point-set CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub meta: PointSetMeta,
    pub d: usize,
    pub m: usize,
    pub weight_sum: f64,
    pub weight_mass: f64,
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Fractional part in `[0,1)`; values that round up to 1 are pulled back
/// below 1.
#[inline]
pub fn frac(y: f64) -> f64 {
    let f = y - y.floor();
    if f >= 1.0 {
        1.0 - f64::EPSILON / 2.0
    } else {
        f
    }
}

/// Frolov nodes `(A^{-1})^T m / a ∩ [0,1)^d` with weights `(a^d |det A|)^{-1}`.
pub fn frolov_pointset(lat: &AdmissibleLattice, limits: &EnumerationLimits) -> Result<WeightedPointSet> {
    let d = lat.dim();
    let nodes = lat.enumerate_dual_points(&AxisBox::cube(d, 0.0, 1.0)?, limits)?;
    if nodes.is_empty() {
        return Err(Error::Construction(format!(
            "no Frolov nodes in the unit cube for a = {}",
            lat.scale()
        )));
    }
    let w = lat.node_weight();
    let meta = PointSetMeta::new(PointSetKind::Frolov)
        .with("d", d as f64)
        .with("a", lat.scale())
        .with("det_A", lat.det())
        .with("N", nodes.len() as f64);
    let weights = vec![w; nodes.len()];
    let points = nodes.into_iter().flat_map(|n| n.x).collect();
    WeightedPointSet::new(d, points, weights, meta)
}

/// Periodized Frolov nodes: `η^μ` are the dual nodes in `[-1/2, 3/2)^d`,
/// `ξ^μ = {η^μ}`, and `λ_μ = (a^d |det A|)^{-1} w(η^μ)`.
pub fn periodized_frolov_pointset(
    lat: &AdmissibleLattice,
    limits: &EnumerationLimits,
) -> Result<WeightedPointSet> {
    let d = lat.dim();
    let nodes = lat.enumerate_dual_points(&AxisBox::cube(d, -0.5, 1.5)?, limits)?;
    if nodes.is_empty() {
        return Err(Error::Construction(format!(
            "no Frolov nodes in [-1/2, 3/2)^d for a = {}",
            lat.scale()
        )));
    }
    let base = lat.node_weight();
    let weights: Vec<f64> = nodes.iter().map(|n| base * window_weight(&n.x)).collect();
    let eta: Vec<f64> = nodes.into_iter().flat_map(|n| n.x).collect();
    let xi: Vec<f64> = eta.iter().map(|&y| frac(y)).collect();
    let meta = PointSetMeta::new(PointSetKind::FrolovPeriodized)
        .with("d", d as f64)
        .with("a", lat.scale())
        .with("det_A", lat.det())
        .with("m", weights.len() as f64);
    let mut ps = WeightedPointSet::new(d, xi, weights, meta)?;
    ps.pre_wrap = Some(eta);
    Ok(ps)
}

/// Fibonacci numbers with `b_1 = b_2 = 1`.
pub fn fibonacci_number(n: u32) -> Result<u64> {
    if n == 0 || n > 90 {
        return Err(Error::arg(format!("Fibonacci index {n} outside 1..=90")));
    }
    let (mut a, mut b) = (1u64, 1u64);
    for _ in 2..n {
        let c = a + b;
        a = b;
        b = c;
    }
    Ok(b)
}

/// `{(μ/b_n, {μ b_{n-1}/b_n})}` for `μ = 0..b_n-1`, equal weights `1/b_n`.
pub fn fibonacci_pointset(n: u32) -> Result<WeightedPointSet> {
    if n < 3 {
        return Err(Error::arg("Fibonacci index must be at least 3"));
    }
    let bn = fibonacci_number(n)?;
    if bn > 50_000_000 {
        return Err(Error::ResourceLimit {
            what: "Fibonacci point count",
            required: bn as f64,
            cap: 5e7,
        });
    }
    let prev = fibonacci_number(n - 1)?;
    let mut points = Vec::with_capacity(2 * bn as usize);
    for mu in 0..bn {
        points.push(mu as f64 / bn as f64);
        points.push(((mu as u128 * prev as u128) % bn as u128) as f64 / bn as f64);
    }
    let meta = PointSetMeta::new(PointSetKind::Fibonacci)
        .with("n", f64::from(n))
        .with("b_n", bn as f64)
        .with("b_n_minus_1", prev as f64);
    WeightedPointSet::new(2, points, vec![1.0 / bn as f64; bn as usize], meta)
}

/// SplitMix64: `state += 0x9E3779B97F4A7C15`, then the output is
/// `z = state; z = (z ^ z>>30) * 0xBF58476D1CE4E5B9; z = (z ^ z>>27) * 0x94D049BB133111EB; z ^ z>>31`
/// (all arithmetic wrapping mod 2^64). Uniform doubles take the top 53 bits:
/// `(next >> 11) * 2^-53`.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

pub fn random_pointset(m: usize, d: usize, seed: u64) -> Result<WeightedPointSet> {
    if m == 0 || d == 0 {
        return Err(Error::arg("random point set needs m >= 1 and d >= 1"));
    }
    let mut rng = SplitMix64::new(seed);
    let points = (0..m * d).map(|_| rng.next_f64()).collect();
    let mut meta = PointSetMeta::new(PointSetKind::Random)
        .with("m", m as f64)
        .with("d", d as f64);
    meta.seed = Some(seed);
    WeightedPointSet::new(d, points, vec![1.0 / m as f64; m], meta)
}
