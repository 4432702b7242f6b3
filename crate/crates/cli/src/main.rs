#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod output;

use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use output::{num, path, write_json, Csv, Meta};
use revlab::boxdim::{apply_fit_window, default_eps_grid, fit_dimension, SampledGraph};
use revlab::cfrac::{expand, levy_constant, levy_rate, Target};
use revlab::evolution::{evolve_bo, evolve_schrodinger};
use revlab::experiment::{revival_figure, revival_pair, ResolvedTime, TimeSpec, DEFAULT_DEPTH};
use revlab::gauss::{gauss_weights, weyl_scan, DEFAULT_WEYL_C};
use revlab::initial::PiecewiseConstant;
use revlab::regularity::{LittlewoodPaleyBank, LpNorm};
use revlab::revival::{lattice_avoiding_grid, RevivalPlan};
use revlab::{Error, RationalTime, TimeMult, TorusGrid};

#[derive(Parser, Debug)]
#[command(name = "revlab", version, about = "Revivals and fractal profiles of periodic dispersive flows")]
struct Cli {
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, env = "REVLAB_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Spectral solution at t = 2π·t-mult.
    Solve(SolveArgs),
    /// Exact Benjamin–Ono revival at t = 2πp/q.
    Revive(ReviveArgs),
    /// Continued-fraction convergents of a target.
    Approx(ApproxArgs),
    /// Dyadic Weyl-sum scan.
    Weyl(WeylArgs),
    /// Per-scale Besov seminorms of the evolved indicator.
    Besov(BesovArgs),
    /// Box-counting dimension of a sampled graph.
    Dimension(DimensionArgs),
    /// Benjamin–Ono revival with the Schrödinger real and imaginary parts at t = 2π/3.
    Figure1(FigureArgs),
    /// Revival at t = 2π·2584/1597 and its dimension fit.
    Figure2(FigureArgs),
    /// Revival at t = 2π·23225/8544 and its dimension fit.
    Figure3(FigureArgs),
    /// Quick internal consistency checks.
    Selftest,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Equation {
    Bo,
    Schrodinger,
}

fn default_ic() -> String {
    format!("indicator:{},{}", -FRAC_PI_2, FRAC_PI_2)
}

#[derive(Args, Debug)]
struct IcArg {
    /// Initial datum: `indicator:a,b` or `step:a1=v1,a2=v2,…`.
    #[arg(long, default_value_t = default_ic())]
    ic: String,
}

impl IcArg {
    fn parse(&self) -> Result<PiecewiseConstant, Error> {
        self.ic.parse()
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, value_enum, default_value_t = Equation::Bo)]
    eq: Equation,
    /// Time in units of 2π: `p/q`, `phi`, `e` or a decimal.
    #[arg(long)]
    t_mult: String,
    /// Continued-fraction depth used for `phi` and `e`.
    #[arg(long, default_value_t = DEFAULT_DEPTH)]
    depth: usize,
    /// Truncation order.
    #[arg(long = "N", default_value_t = 16384)]
    n: usize,
    #[command(flatten)]
    ic: IcArg,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReviveArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    q: u64,
    #[command(flatten)]
    ic: IcArg,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ApproxArgs {
    /// `phi`, `e` or a decimal.
    #[arg(long)]
    target: String,
    #[arg(long, default_value_t = 20)]
    depth: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct WeylArgs {
    #[arg(long)]
    t_mult: String,
    #[arg(long, default_value_t = DEFAULT_DEPTH)]
    depth: usize,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 4)]
    jmin: u32,
    #[arg(long, default_value_t = 12)]
    jmax: u32,
    /// Grid points for the supremum in x; defaults to 2^(jmax+2).
    #[arg(long)]
    x_res: Option<usize>,
    /// Bound the ratios are checked against.
    #[arg(long, default_value_t = DEFAULT_WEYL_C)]
    c: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum PArg {
    #[value(name = "1")]
    One,
    Inf,
}

#[derive(Args, Debug)]
struct BesovArgs {
    #[arg(long, default_value_t = 0.45)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = PArg::Inf)]
    p: PArg,
    #[arg(long)]
    t_mult: String,
    #[arg(long, default_value_t = 16)]
    depth: usize,
    /// Truncation order, a power of two.
    #[arg(long = "N", default_value_t = 16384)]
    n: usize,
    #[command(flatten)]
    ic: IcArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DimensionArgs {
    /// CSV with x in the first column.
    #[arg(long = "in")]
    input: PathBuf,
    /// Zero-based column holding the ordinates.
    #[arg(long, default_value_t = 1)]
    column: usize,
    #[arg(long, default_value_t = 20)]
    eps_num: usize,
    /// Keep only box sizes in `lo,hi`.
    #[arg(long)]
    fit_window: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FigureArgs {
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 20)]
    eps_num: usize,
    /// Sampled profile (CSV).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dimension fit (JSON); figures 2 and 3 only.
    #[arg(long)]
    fit_out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Lab(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lab(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lab(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical_guard() { 3 } else { 2 })
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Solve(a) => solve(a),
        Command::Revive(a) => revive(a),
        Command::Approx(a) => approx(a),
        Command::Weyl(a) => weyl(a),
        Command::Besov(a) => besov(a),
        Command::Dimension(a) => dimension(a),
        Command::Figure1(a) => figure1(a),
        Command::Figure2(a) => figure(a, "figure2", 2584, 1597),
        Command::Figure3(a) => figure(a, "figure3", 23225, 8544),
        Command::Selftest => selftest(),
    }
}

fn convergent_note(r: &ResolvedTime) -> Option<String> {
    match (&r.convergent, r.time) {
        (Some(c), _) => Some(format!("{}/{} (gap {:e})", c.p, c.q, c.gap)),
        (None, TimeMult::Rational(rt)) => Some(rt.to_string()),
        (None, TimeMult::Real(_)) => None,
    }
}

fn solve(a: SolveArgs) -> Result<(), Failure> {
    let u0 = a.ic.parse()?;
    let spec: TimeSpec = a.t_mult.parse()?;
    let t = spec.resolve(a.depth)?;
    // fail on the phase range before allocating the series
    t.time.quadratic_phase(a.n as u64)?;
    let series = u0.to_series(a.n)?;
    let grid = TorusGrid::midpoint(a.samples)?;
    let config = json!({
        "eq": format!("{:?}", a.eq).to_lowercase(), "t_mult": spec.to_string(), "depth": a.depth,
        "N": a.n, "ic": u0.to_string(), "samples": a.samples, "grid_offset": grid.offset(),
    });
    let meta = Meta::new("solve", config).truncation(a.n).convergent(convergent_note(&t));
    let x = grid.to_vec();
    let csv = match a.eq {
        Equation::Bo => {
            let u = evolve_bo(&series, &t.time)?.evaluate(&grid)?;
            let mut csv = Csv::new(&meta, &["x", "u"]);
            for (x, u) in x.iter().zip(u) {
                csv.row(&[num(*x), num(u)]);
            }
            csv
        }
        Equation::Schrodinger => {
            let v = evolve_schrodinger(&series, &t.time)?.evaluate_complex(&grid);
            let mut csv = Csv::new(&meta, &["x", "re", "im"]);
            for (x, v) in x.iter().zip(v) {
                csv.row(&[num(*x), num(v.re), num(v.im)]);
            }
            csv
        }
    };
    csv.write(path(&a.out))?;
    Ok(())
}

fn revive(a: ReviveArgs) -> Result<(), Failure> {
    let u0 = a.ic.parse()?;
    let rt = RationalTime::new(a.p, a.q)?;
    let grid = lattice_avoiding_grid(&u0, rt.q(), a.samples)?;
    let u = RevivalPlan::new(rt)?.bo(&u0, &grid)?;
    let config = json!({
        "p": a.p, "q": a.q, "ic": u0.to_string(), "samples": a.samples, "grid_offset": grid.offset(),
    });
    let meta = Meta::new("revive", config).convergent(Some(rt.to_string()));
    let mut csv = Csv::new(&meta, &["x", "u"]);
    for (x, u) in grid.nodes().zip(u) {
        csv.row(&[num(x), num(u)]);
    }
    csv.write(path(&a.out))?;
    Ok(())
}

fn approx(a: ApproxArgs) -> Result<(), Failure> {
    let target: Target = a.target.parse()?;
    let cf = expand(&target, a.depth)?;
    let meta = Meta::new("approx", json!({ "target": a.target, "depth": a.depth }));
    let convergents: Vec<_> = cf
        .convergents
        .iter()
        .enumerate()
        .map(|(n, c)| json!({ "n": n, "a_n": cf.partial_quotients[n], "p": c.p, "q": c.q, "gap": c.gap }))
        .collect();
    let rate = levy_rate(&cf).ok();
    let body = json!({
        "convergents": convergents,
        "partial_quotients": cf.partial_quotients,
        "levy_rate": rate,
        "levy_constant": levy_constant(),
    });
    write_json(path(&a.out), &meta, body)?;
    if cf.convergents.len() < cf.len() {
        eprintln!("note: convergents beyond index {} exceed 64 bits and are omitted", cf.convergents.len() - 1);
    }
    Ok(())
}

fn weyl(a: WeylArgs) -> Result<(), Failure> {
    let spec: TimeSpec = a.t_mult.parse()?;
    let t = spec.resolve(a.depth)?;
    let bank = LittlewoodPaleyBank::build(a.jmax.max(1))?;
    let res = a.x_res.unwrap_or(1usize << (a.jmax + 2).min(40));
    let report = weyl_scan(&t.time, a.delta, a.jmin, a.jmax, |j| bank.shell(j), res, a.c)?;
    let config = json!({
        "t_mult": spec.to_string(), "depth": a.depth, "delta": a.delta, "jmin": a.jmin, "jmax": a.jmax,
        "x_res": res, "c": a.c,
    });
    let meta = Meta::new("weyl", config).convergent(convergent_note(&t));
    let mut csv = Csv::new(&meta, &["j", "S_j", "ratio_j"]);
    for s in &report.scales {
        csv.row(&[s.j.to_string(), num(s.s), num(s.ratio)]);
    }
    csv.write(path(&a.out))?;
    eprintln!(
        "max ratio {:.6}; {} the bound {}",
        report.max_ratio(),
        if report.passes() { "within" } else { "exceeds" },
        a.c
    );
    Ok(())
}

fn besov(a: BesovArgs) -> Result<(), Failure> {
    if !a.n.is_power_of_two() || a.n < 4 {
        return Err(Error::InvalidArgument(format!("--N must be a power of two >= 4, got {}", a.n)).into());
    }
    let u0 = a.ic.parse()?;
    let spec: TimeSpec = a.t_mult.parse()?;
    let t = spec.resolve(a.depth)?;
    let f = evolve_bo(&u0.to_series(a.n)?, &t.time)?;
    let j_max = (a.n.trailing_zeros() - 1).min(16);
    let bank = LittlewoodPaleyBank::build(j_max)?;
    let grid = TorusGrid::midpoint(4 * a.n)?;
    let p = match a.p {
        PArg::One => LpNorm::One,
        PArg::Inf => LpNorm::Infinity,
    };
    let report = bank.besov_seminorm(&f, a.alpha, p, &grid)?;
    let holder = bank.holder_exponent_estimate(&f, &grid);
    let config = json!({
        "alpha": a.alpha, "p": format!("{:?}", a.p).to_lowercase(), "t_mult": spec.to_string(),
        "depth": a.depth, "N": a.n, "ic": u0.to_string(), "grid": grid.len(),
    });
    let meta = Meta::new("besov", config).truncation(a.n).convergent(convergent_note(&t));
    // ratio: weighted value at j over the value at j - 1
    let mut csv = Csv::new(&meta, &["j", "seminorm", "ratio"]);
    let mut prev: Option<f64> = None;
    for s in &report.scales {
        let ratio = prev.filter(|p| *p > 0.0).map(|p| num(s.weighted / p)).unwrap_or_default();
        csv.row(&[s.j.to_string(), num(s.weighted), ratio]);
        prev = Some(s.weighted);
    }
    csv.write(path(&a.out))?;
    eprintln!("sup over scales: {:.6}", report.sup);
    match holder {
        Ok(h) => eprintln!("Holder exponent estimate: {:.4} (r² {:.4})", h.alpha, h.r2),
        Err(e) => eprintln!("Holder exponent estimate unavailable: {e}"),
    }
    Ok(())
}

fn read_graph(file: &PathBuf, column: usize) -> Result<SampledGraph, Failure> {
    let text = fs::read_to_string(file).map_err(|e| Failure::Io(format!("{}: {e}", file.display())))?;
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let parse = |k: usize| fields.get(k).and_then(|f| f.trim().parse::<f64>().ok());
        match (parse(0), parse(column)) {
            (Some(a), Some(b)) => {
                x.push(a);
                y.push(b);
            }
            _ if x.is_empty() => continue,
            _ => return Err(Error::Parse(format!("line {}: cannot read columns 0 and {column}", i + 1)).into()),
        }
    }
    Ok(SampledGraph::new(x, y)?)
}

fn parse_window(s: &str) -> Result<(f64, f64), Error> {
    let (lo, hi) = s.split_once(',').ok_or_else(|| Error::Parse(format!("fit window {s:?} is not lo,hi")))?;
    let lo: f64 = lo.trim().parse().map_err(|_| Error::Parse(format!("bad window bound {lo:?}")))?;
    let hi: f64 = hi.trim().parse().map_err(|_| Error::Parse(format!("bad window bound {hi:?}")))?;
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!("fit window needs lo < hi, got {lo},{hi}")));
    }
    Ok((lo, hi))
}

fn dimension(a: DimensionArgs) -> Result<(), Failure> {
    let g = read_graph(&a.input, a.column)?;
    let window = a.fit_window.as_deref().map(parse_window).transpose()?;
    let mut eps = default_eps_grid(&g, a.eps_num);
    let policy = match window {
        Some((lo, hi)) => {
            eps = apply_fit_window(&eps, lo, hi);
            format!("{} geometric sizes from 4(b-a)/N to (b-a)/8, window [{lo}, {hi}]", a.eps_num)
        }
        None => format!("{} geometric sizes from 4(b-a)/N to (b-a)/8", a.eps_num),
    };
    let fit = fit_dimension(&g, &eps)?;
    let config = json!({
        "in": a.input.display().to_string(), "column": a.column, "eps_num": a.eps_num, "fit_window": a.fit_window,
    });
    let meta = Meta::new("dimension", config);
    let body = json!({
        "epsilons": fit.epsilons, "counts": fit.counts, "D": fit.d, "r2": fit.r2, "eps_policy": policy,
    });
    write_json(path(&a.out), &meta, body)?;
    eprintln!("D = {:.4}, r² = {:.4}", fit.d, fit.r2);
    Ok(())
}

fn figure1(a: FigureArgs) -> Result<(), Failure> {
    let u0 = PiecewiseConstant::canonical();
    let rt = RationalTime::new(1, 3)?;
    let pair = revival_pair(&u0, rt, a.samples)?;
    let config =
        json!({ "t_mult": "1/3", "ic": u0.to_string(), "samples": a.samples, "grid_offset": pair.grid.offset() });
    let meta = Meta::new("figure1", config).convergent(Some(rt.to_string()));
    let mut csv = Csv::new(&meta, &["x", "u", "re_v", "im_v"]);
    for ((x, u), v) in pair.grid.nodes().zip(&pair.u).zip(&pair.v) {
        csv.row(&[num(x), num(*u), num(v.re), num(v.im)]);
    }
    csv.write(path(&a.out))?;
    Ok(())
}

fn figure(a: FigureArgs, name: &str, p: u64, q: u64) -> Result<(), Failure> {
    let u0 = PiecewiseConstant::canonical();
    let rt = RationalTime::new(p, q)?;
    let fig = revival_figure(&u0, rt, a.samples, a.eps_num)?;
    let config = json!({
        "t_mult": format!("{p}/{q}"), "ic": u0.to_string(), "samples": a.samples, "eps_num": a.eps_num,
        "grid_offset": fig.grid.offset(),
    });
    let meta = Meta::new(name, config).convergent(Some(rt.to_string()));
    let mut csv = Csv::new(&meta, &["x", "u"]);
    for (x, u) in fig.grid.nodes().zip(&fig.u) {
        csv.row(&[num(x), num(*u)]);
    }
    csv.write(path(&a.out))?;
    if let Some(fit_out) = &a.fit_out {
        let body = json!({
            "epsilons": fig.fit.epsilons, "counts": fig.fit.counts, "D": fig.fit.d, "r2": fig.fit.r2,
            "eps_policy": format!("{} geometric sizes from 4(b-a)/N to (b-a)/8", a.eps_num),
        });
        write_json(Some(fit_out), &meta, body)?;
    }
    eprintln!("D = {:.4}, r² = {:.4}", fig.fit.d, fig.fit.r2);
    Ok(())
}

fn selftest() -> Result<(), Failure> {
    let mut failures = 0;
    let mut check = |name: &str, ok: bool| {
        println!("[{}] {name}", if ok { "PASS" } else { "FAIL" });
        failures += usize::from(!ok);
    };
    let g = gauss_weights(3, 7)?;
    check("Gauss weights sum to q", (g.sum().re - 7.0).abs() < 1e-10 && g.sum().im.abs() < 1e-10);
    check(
        "Gauss weights have modulus √q for odd q",
        g.weights().iter().all(|w| (w.norm() - 7f64.sqrt()).abs() < 1e-10),
    );
    let u0 = PiecewiseConstant::canonical();
    let f = u0.to_series(256)?;
    let h2 = f.hilbert().hilbert().max_coeff_distance(&f.shift_mean(-f.coeff(0)).scale(-1.0));
    check("H² = -(I - P₀)", h2 < 1e-14);
    let grid = TorusGrid::midpoint(1000)?;
    let half = RevivalPlan::new(RationalTime::new(1, 2)?)?.bo(&u0, &grid)?;
    check(
        "half-period revival swaps arcs",
        half.iter().zip(grid.nodes()).all(|(u, x)| (u - u0.value_at(x - std::f64::consts::PI)).abs() < 1e-14),
    );
    let phi = expand(&Target::phi(), 16)?;
    check("2584/1597 is a convergent of φ", phi.convergents.iter().any(|c| (c.p, c.q) == (2584, 1597)));
    if failures > 0 {
        return Err(Error::NumericalCheck(format!("{failures} self-test checks failed")).into());
    }
    Ok(())
}
