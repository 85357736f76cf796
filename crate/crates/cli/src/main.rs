use clap::{Args, Parser, Subcommand, ValueEnum};
use fvdisc::config::{sha256_hex, Config};
use fvdisc::discrepancy::{
    constraint_sample, optimize_weights_minimax, sample_integrals, MinimaxLimits, SearchSpec,
    WeightMode,
};
use fvdisc::dispersion::dispersion;
use fvdisc::harness::{
    family_from_config, fixed_volume_curve, parse_mode, rates, verify_lattice, Measure, SetParams,
    WeightChoice,
};
use fvdisc::io::{fmt17, to_json_string};
use fvdisc::lattice::EnumerationLimits;
use fvdisc::pointsets::WeightedPointSet;
use fvdisc::{Error, Result};
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fvdisc", version, about = "Frolov point sets and smooth fixed-volume discrepancy")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a point set (CSV plus JSON sidecar).
    Gen(GenArgs),
    /// Discrepancy of a point-set file.
    Disc(DiscArgs),
    /// Dispersion of one or more point-set files.
    Disp(DispArgs),
    /// Decay-rate sweep over a family described by a config file.
    Rates(RatesArgs),
    /// Norm-form, box-count and dyadic-block checks for a Frolov lattice.
    VerifyLattice(VerifyArgs),
    /// Periodic discrepancy along a geometric volume grid.
    FixedVolumeCurve(CurveArgs),
    /// Minimax cubature weights via linear programming.
    Weights(WeightsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Frolov,
    FrolovPeriodized,
    Fibonacci,
    Random,
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Lattice scale (Frolov families), must exceed 1.
    #[arg(long)]
    a: Option<f64>,
    /// Fibonacci index (b_1 = b_2 = 1).
    #[arg(long)]
    n: Option<u32>,
    /// Number of random points.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output CSV path; defaults to `<kind>.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightsFlag {
    Native,
    Equal,
    Optimized,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 64)]
    z_grid: usize,
    #[arg(long, default_value_t = 16)]
    u_samples: usize,
    #[arg(long, default_value_t = 40)]
    refine_iters: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl SearchArgs {
    fn spec(&self) -> SearchSpec {
        SearchSpec {
            z_grid: self.z_grid,
            u_samples: self.u_samples,
            refine_iters: self.refine_iters,
            seed: self.seed,
        }
    }

    fn record(&self, cfg: &mut Config) {
        cfg.set("z_grid", self.z_grid);
        cfg.set("u_samples", self.u_samples);
        cfg.set("refine_iters", self.refine_iters);
        cfg.set("seed", self.seed);
    }
}

#[derive(Args)]
struct DiscArgs {
    setfile: PathBuf,
    /// fixed_volume, periodic, global, star or b_r.
    #[arg(long, default_value = "periodic")]
    mode: String,
    #[arg(long, default_value_t = 2)]
    r: u32,
    /// Volume `v` (periodic) or box volume `V` (fixed_volume).
    #[arg(long)]
    v: Option<f64>,
    /// Comma-separated volumes for global mode.
    #[arg(long, value_delimiter = ',')]
    v_grid: Vec<f64>,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long, value_enum, default_value = "native")]
    weights: WeightsFlag,
    /// Constraint sample size when `--weights optimized`.
    #[arg(long, default_value_t = 500)]
    lp_samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DispArgs {
    #[arg(required = true)]
    setfiles: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RatesArgs {
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    a: f64,
    /// Norm-form scan radius `‖m‖_∞ <= M`.
    #[arg(long = "radius", short = 'M', default_value_t = 50)]
    radius: i64,
    #[arg(long, default_value_t = 1000)]
    boxes: usize,
    /// Dyadic block orders checked beyond `n0`.
    #[arg(long, default_value_t = 3)]
    extra_orders: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct CurveArgs {
    setfile: PathBuf,
    #[arg(long, default_value_t = 2)]
    r: u32,
    /// Smallest volume of the grid `v0 · 2^j`.
    #[arg(long)]
    v0: f64,
    /// Number of grid points; defaults to all doublings up to `2^-d`.
    #[arg(long)]
    steps: Option<usize>,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WeightsArgs {
    setfile: PathBuf,
    #[arg(long, default_value_t = 2)]
    r: u32,
    #[arg(long)]
    v: f64,
    #[arg(long, default_value_t = 500)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Bound `Σ|λ| <= B`.
    #[arg(long)]
    mass_bound: Option<f64>,
    /// Write the reweighted set here.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Gen(a) => gen(a),
        Cmd::Disc(a) => disc(a),
        Cmd::Disp(a) => disp(a),
        Cmd::Rates(a) => run_rates(a),
        Cmd::VerifyLattice(a) => verify(a),
        Cmd::FixedVolumeCurve(a) => curve(a),
        Cmd::Weights(a) => weights(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn file_hash(path: &Path) -> Result<String> {
    Ok(sha256_hex(&std::fs::read(path)?))
}

fn envelope(cfg: &Config, seed: u64, key: &str, body: Value) -> Result<String> {
    let mut obj = serde_json::Map::new();
    obj.insert("config_sha256".into(), json!(cfg.hash()));
    obj.insert("seed".into(), json!(seed));
    obj.insert(key.into(), body);
    Ok(to_json_string(&Value::Object(obj))?)
}

fn need<T>(v: Option<T>, what: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidArgument(format!("missing --{what}")))
}

fn gen(a: GenArgs) -> Result<ExitCode> {
    let (params, name) = match a.kind {
        Kind::Frolov => (SetParams::frolov(a.d, need(a.a, "a")?), "frolov"),
        Kind::FrolovPeriodized => (SetParams::frolov_periodized(a.d, need(a.a, "a")?), "frolov-periodized"),
        Kind::Fibonacci => (SetParams::fibonacci(need(a.n, "n")?), "fibonacci"),
        Kind::Random => (SetParams::random(need(a.m, "m")?, a.d, a.seed), "random"),
    };
    let ps = params.build(&EnumerationLimits::default())?;
    let out = a.out.unwrap_or_else(|| PathBuf::from(format!("{name}.csv")));
    let side = ps.write_files(&out)?;
    eprintln!("wrote {} points to {} ({})", ps.len(), out.display(), side.display());
    Ok(ExitCode::SUCCESS)
}

fn disc(a: DiscArgs) -> Result<ExitCode> {
    let ps = WeightedPointSet::read_file(&a.setfile)?;
    let mode = parse_mode(&a.mode)?;
    let mut cfg = Config::default();
    cfg.set("command", "disc");
    cfg.set("set_sha256", file_hash(&a.setfile)?);
    cfg.set("mode", &a.mode);
    cfg.set("r", a.r);
    if let Some(v) = a.v {
        cfg.set("v", fmt17(v));
    }
    if !a.v_grid.is_empty() {
        cfg.set("v_grid", a.v_grid.iter().map(|&v| fmt17(v)).collect::<Vec<_>>().join(","));
    }
    a.search.record(&mut cfg);
    let (ps, choice, weight_mode) = match a.weights {
        WeightsFlag::Native => (ps, WeightChoice::Native, WeightMode::Native),
        WeightsFlag::Equal => (ps, WeightChoice::Equal, WeightMode::Equal),
        WeightsFlag::Optimized => {
            cfg.set("weights", "optimized");
            cfg.set("lp_samples", a.lp_samples);
            let v = need(a.v, "v")?;
            let w = optimize(&ps, a.r, v, a.lp_samples, a.search.seed, None)?;
            (ps.with_weights(w.0)?, WeightChoice::Native, WeightMode::Optimized)
        }
    };
    if matches!(a.weights, WeightsFlag::Equal) {
        cfg.set("weights", "equal");
    }
    let measure = Measure {
        mode,
        r: a.r,
        volume: a.v,
        v_grid: a.v_grid,
        search: a.search.spec(),
        weights: choice,
    };
    let rep = measure.run(&ps)?.with_weight_mode(weight_mode);
    let body = serde_json::to_value(&rep)?;
    let text = envelope(&cfg, a.search.seed, "report", body)?;
    emit(&text, a.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn optimize(
    ps: &WeightedPointSet,
    r: u32,
    v: f64,
    samples: usize,
    seed: u64,
    mass_bound: Option<f64>,
) -> Result<(Vec<f64>, Value)> {
    let positions: Vec<Vec<f64>> = ps.points().map(<[f64]>::to_vec).collect();
    let sample = constraint_sample(ps.dim(), v, samples, seed)?;
    let c = sample_integrals(&sample, r);
    let sol = optimize_weights_minimax(&positions, r, &sample, &c, mass_bound, &MinimaxLimits::default())?;
    let summary = json!({
        "value": sol.value,
        "lp_value": sol.lp_value,
        "equal_weights_value": sol.equal_weights_value,
        "iterations": sol.iterations,
        "samples": samples,
    });
    Ok((sol.weights, summary))
}

fn disp(a: DispArgs) -> Result<ExitCode> {
    let mut cfg = Config::default();
    cfg.set("command", "disp");
    let mut body = String::new();
    for (i, f) in a.setfiles.iter().enumerate() {
        cfg.set(&format!("set{i}_sha256"), file_hash(f)?);
        let ps = WeightedPointSet::read_file(f)?;
        let r = dispersion(ps.coords(), ps.dim())?;
        let n = ps.len();
        let _ = writeln!(body, "{},{},{}", n, fmt17(r.volume), fmt17(n as f64 * r.volume));
        let lo: Vec<String> = r.lower.iter().map(|&x| fmt17(x)).collect();
        let hi: Vec<String> = r.upper.iter().map(|&x| fmt17(x)).collect();
        let _ = writeln!(body, "# box lower={} upper={}", lo.join(" "), hi.join(" "));
    }
    let text = format!("# config_sha256={}\n# seed=0\nn,disp,n_disp\n{body}", cfg.hash());
    emit(&text, a.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn run_rates(a: RatesArgs) -> Result<ExitCode> {
    let cfg = Config::from_file(&a.config)?;
    let members = family_from_config(&cfg)?;
    let measure = Measure::from_config(&cfg)?;
    let out = rates(&members, &measure, &EnumerationLimits::default());
    emit(&out.to_csv(&cfg.hash(), measure.search.seed), a.out.as_deref())?;
    if let Some(fit) = &out.fit {
        eprintln!("slope {:.4} (rms residual {:.3e})", fit.slope, fit.residual_rms);
    }
    match out.failure {
        Some(e) => Err(e),
        None => Ok(ExitCode::SUCCESS),
    }
}

fn verify(a: VerifyArgs) -> Result<ExitCode> {
    let mut cfg = Config::default();
    cfg.set("command", "verify-lattice");
    cfg.set("d", a.d);
    cfg.set("a", fmt17(a.a));
    cfg.set("radius", a.radius);
    cfg.set("boxes", a.boxes);
    cfg.set("extra_orders", a.extra_orders);
    cfg.set("seed", a.seed);
    let chk = verify_lattice(a.d, a.a, a.radius, a.boxes, a.extra_orders, a.seed, &EnumerationLimits::default())?;
    println!("{}", envelope(&cfg, a.seed, "check", serde_json::to_value(&chk)?)?.trim_end());
    eprintln!(
        "min norm form {:.6}, worst box excess {:.3}, blocks below n0={} empty: {} -> {}",
        chk.min_norm_form,
        chk.worst_box_excess,
        chk.n0,
        chk.empty_below_n0,
        if chk.pass { "PASS" } else { "FAIL" }
    );
    Ok(if chk.pass { ExitCode::SUCCESS } else { ExitCode::from(4) })
}

fn curve(a: CurveArgs) -> Result<ExitCode> {
    let ps = WeightedPointSet::read_file(&a.setfile)?;
    let v_max = 0.5f64.powi(ps.dim() as i32);
    if !(a.v0 > 0.0 && a.v0 <= v_max) {
        return Err(Error::InvalidArgument(format!("v0 = {} outside (0, 2^-d]", a.v0)));
    }
    let mut grid = Vec::new();
    let mut v = a.v0;
    while v <= v_max * (1.0 + 1e-12) && a.steps.map_or(true, |s| grid.len() < s) {
        grid.push(v.min(v_max));
        v *= 2.0;
    }
    let mut cfg = Config::default();
    cfg.set("command", "fixed-volume-curve");
    cfg.set("set_sha256", file_hash(&a.setfile)?);
    cfg.set("r", a.r);
    cfg.set("v0", fmt17(a.v0));
    cfg.set("steps", grid.len());
    a.search.record(&mut cfg);
    let c = fixed_volume_curve(&ps, a.r, &grid, &a.search.spec())?;
    emit(&c.to_csv(&cfg.hash(), a.search.seed), a.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn weights(a: WeightsArgs) -> Result<ExitCode> {
    let ps = WeightedPointSet::read_file(&a.setfile)?;
    let mut cfg = Config::default();
    cfg.set("command", "weights");
    cfg.set("set_sha256", file_hash(&a.setfile)?);
    cfg.set("r", a.r);
    cfg.set("v", fmt17(a.v));
    cfg.set("samples", a.samples);
    cfg.set("seed", a.seed);
    if let Some(b) = a.mass_bound {
        cfg.set("mass_bound", fmt17(b));
    }
    let (w, mut summary) = optimize(&ps, a.r, a.v, a.samples, a.seed, a.mass_bound)?;
    summary["weights"] = json!(w);
    if let Some(out) = &a.out {
        ps.with_weights(w)?.write_files(out)?;
    }
    println!("{}", envelope(&cfg, a.seed, "minimax", summary)?.trim_end());
    Ok(ExitCode::SUCCESS)
}
