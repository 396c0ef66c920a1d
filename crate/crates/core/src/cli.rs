//! Batch front end behind the `soliton` binary.
//!
//! ```text
//! soliton describe  <manifest> [--grid N,M,..] [--out FILE]
//! soliton check     <manifest> [IDS..] [--checks id,id] [--grid ..] [--tol X] [--out FILE]
//! soliton integrate <manifest> <EXPR> [--grid ..] [--out FILE]
//! soliton fit       <manifest> [--grid ..] [--tol X] [--out FILE]
//! ```
//!
//! Reports are pretty-printed JSON with fixed key order and every float
//! written with 17 significant digits. Exit status: 0 on success (including
//! `hypothesis-not-met`), 1 if any verdict is `violated`, 2 on usage, schema
//! or evaluation errors. `SOLITON_THREADS` caps the worker count.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::fit::{fit_potential, BasisExpansion, BasisFamily, FitResult};
use crate::integrand::Integrand;
use crate::manifest::Manifest;
use crate::quadrature::{Grid, GridSpec, Rule};
use crate::soliton::{
    CheckId, CheckReport, Evaluation, Potential, SolitonKind, SolitonSpec, Tolerances, Verdict,
};

#[derive(Debug, Parser)]
#[command(
    name = "soliton",
    version,
    about = "Curvature, soliton identity checks and potential fits on compact charts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dimension, coordinate ranges, scalar curvature range, Einstein deviation.
    Describe(Common),
    /// Run identity checks and theorem verdicts (default: all applicable).
    Check(CheckArgs),
    /// Integrate a DSL expression over the manifold.
    Integrate(IntegrateArgs),
    /// Fit a gradient potential, then run every applicable check on the result.
    Fit(Common),
}

#[derive(Debug, Args)]
struct Common {
    manifest: PathBuf,
    /// Node counts per coordinate, e.g. `32,64`.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<usize>>,
    /// Pointwise identity tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    common: Common,
    /// Check ids.
    ids: Vec<String>,
    /// Comma-separated check ids.
    #[arg(long, value_delimiter = ',')]
    checks: Vec<String>,
}

#[derive(Debug, Args)]
struct IntegrateArgs {
    #[command(flatten)]
    common: Common,
    /// Integrand, e.g. `ric(gradf, gradf)`.
    expression: String,
}

/// JSON formatter: pretty layout, floats as `{:.16e}`.
struct ReportFormatter {
    pretty: PrettyFormatter<'static>,
}

impl Formatter for ReportFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object_value(w)
    }
}

/// Serializes `value` in the report format.
pub fn to_report_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let fmt = ReportFormatter {
        pretty: PrettyFormatter::with_indent(b"  "),
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
    value
        .serialize(&mut ser)
        .expect("report types serialize infallibly");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure {
        code: 2,
        message: message.to_string(),
    }
}

#[derive(Serialize)]
struct GridInfo {
    counts: Vec<usize>,
    rules: Vec<Rule>,
    nodes: usize,
}

impl GridInfo {
    fn new(spec: &GridSpec) -> Self {
        GridInfo {
            counts: spec.counts.clone(),
            rules: spec.rules.clone(),
            nodes: spec.node_count(),
        }
    }
}

#[derive(Serialize)]
struct SolitonInfo {
    kind: SolitonKind,
    potential: BTreeMap<&'static str, Vec<String>>,
    lambda: f64,
    mu: f64,
}

impl SolitonInfo {
    fn new(spec: &SolitonSpec) -> Self {
        let potential = match &spec.potential {
            Potential::Gradient(f) => ("gradient", vec![f.expr().to_string()]),
            Potential::Vector(v) => (
                "vector",
                v.components().iter().map(|e| e.to_string()).collect(),
            ),
        };
        SolitonInfo {
            kind: spec.kind,
            potential: BTreeMap::from([potential]),
            lambda: spec.lambda,
            mu: spec.mu,
        }
    }
}

#[derive(Serialize)]
struct CoordInfo {
    name: String,
    domain: [f64; 2],
    sampled: [f64; 2],
    periodic: bool,
}

#[derive(Serialize)]
struct DescribeReport {
    command: &'static str,
    manifold: String,
    dim: usize,
    coordinates: Vec<CoordInfo>,
    grid: GridInfo,
    volume: f64,
    scalar_curvature: [f64; 2],
    einstein_deviation: f64,
    schur_residual: f64,
}

#[derive(Serialize)]
struct CheckSummary {
    command: &'static str,
    manifold: String,
    grid: GridInfo,
    tolerances: Tolerances,
    soliton: Option<SolitonInfo>,
    reports: Vec<CheckReport>,
    verdicts: BTreeMap<&'static str, usize>,
}

#[derive(Serialize)]
struct IntegrateReport {
    command: &'static str,
    manifold: String,
    expression: String,
    grid: GridInfo,
    value: f64,
}

#[derive(Serialize)]
struct BasisInfo {
    family: BasisFamily,
    degree: usize,
    functions: Vec<String>,
}

#[derive(Serialize)]
struct FitReport {
    command: &'static str,
    manifold: String,
    kind: SolitonKind,
    basis: BasisInfo,
    result: FitResult,
    potential: String,
    checks: CheckSummary,
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::IdentityHolds => "identity-holds",
        Verdict::HypothesisNotMet => "hypothesis-not-met",
        Verdict::Violated => "violated",
    }
}

fn load(common: &Common) -> Result<(Manifest, GridSpec, Tolerances), Failure> {
    let m = Manifest::load(&common.manifest).map_err(usage)?;
    let grid = match &common.grid {
        Some(counts) if counts.len() != m.chart.dim() => {
            return Err(usage(format!(
                "--grid needs {} node counts, got {}",
                m.chart.dim(),
                counts.len()
            )))
        }
        Some(counts) => GridSpec::with_counts(&m.chart, counts.clone()),
        None => m.grid.clone(),
    };
    let mut tol = Tolerances::default();
    if let Some(t) = common.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(usage("--tol must be a positive number"));
        }
        tol.pointwise = t;
    }
    Ok((m, grid, tol))
}

fn run_checks(
    ev: &Evaluation,
    ids: &[CheckId],
    tol: &Tolerances,
    manifold: &str,
) -> Result<CheckSummary, Failure> {
    let mut reports = Vec::with_capacity(ids.len());
    let mut verdicts: BTreeMap<&'static str, usize> = [
        Verdict::IdentityHolds,
        Verdict::HypothesisNotMet,
        Verdict::Violated,
    ]
    .into_iter()
    .map(|v| (verdict_name(v), 0))
    .collect();
    for &id in ids {
        let r = ev.report(id, tol).map_err(usage)?;
        *verdicts.entry(verdict_name(r.verdict)).or_default() += 1;
        reports.push(r);
    }
    Ok(CheckSummary {
        command: "check",
        manifold: manifold.to_string(),
        grid: GridInfo::new(ev.grid().spec()),
        tolerances: *tol,
        soliton: ev.spec().map(SolitonInfo::new),
        reports,
        verdicts,
    })
}

fn describe(common: &Common) -> Result<(String, i32), Failure> {
    let (m, grid, _) = load(common)?;
    let ev = Evaluation::new(&m.chart, &grid).map_err(usage)?;
    let s = ev.curvature_summary();
    let chart = &m.chart;
    let report = DescribeReport {
        command: "describe",
        manifold: chart.name().to_string(),
        dim: chart.dim(),
        coordinates: (0..chart.dim())
            .map(|i| {
                let (a, b) = chart.domain()[i];
                let (sa, sb) = chart.sampled_interval(i);
                CoordInfo {
                    name: chart.coord_names()[i].clone(),
                    domain: [a, b],
                    sampled: [sa, sb],
                    periodic: chart.periodic()[i],
                }
            })
            .collect(),
        grid: GridInfo::new(&grid),
        volume: ev.grid().volume_weights().iter().sum(),
        scalar_curvature: [s.r_min, s.r_max],
        einstein_deviation: s.einstein_deviation,
        schur_residual: s.schur_residual,
    };
    Ok((to_report_json(&report), 0))
}

fn check(args: &CheckArgs) -> Result<(String, i32), Failure> {
    let (m, grid, tol) = load(&args.common)?;
    let names: Vec<&String> = args.ids.iter().chain(&args.checks).collect();
    let requested = names
        .iter()
        .map(|s| s.parse::<CheckId>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(usage)?;
    let ev = match &m.soliton {
        Some(spec) => Evaluation::with_soliton(&m.chart, spec, &grid),
        None => Evaluation::new(&m.chart, &grid),
    }
    .map_err(usage)?;
    let ids = if requested.is_empty() {
        ev.applicable_checks()
    } else {
        requested
    };
    let summary = run_checks(&ev, &ids, &tol, m.chart.name())?;
    let code = if summary.verdicts["violated"] > 0 {
        1
    } else {
        0
    };
    Ok((to_report_json(&summary), code))
}

fn integrate(args: &IntegrateArgs) -> Result<(String, i32), Failure> {
    let (m, grid, _) = load(&args.common)?;
    let integrand =
        Integrand::parse(&args.expression, &m.chart, m.fields.clone()).map_err(usage)?;
    let built = Grid::build(&m.chart, &grid).map_err(usage)?;
    let value = integrand.integrate(&m.chart, &built).map_err(usage)?;
    let report = IntegrateReport {
        command: "integrate",
        manifold: m.chart.name().to_string(),
        expression: args.expression.clone(),
        grid: GridInfo::new(&grid),
        value,
    };
    Ok((to_report_json(&report), 0))
}

fn fit(common: &Common) -> Result<(String, i32), Failure> {
    let (m, grid, tol) = load(common)?;
    let block = m
        .fit
        .clone()
        .ok_or_else(|| usage("manifest has no fit block"))?;
    let kind = block
        .kind
        .or(m.soliton.as_ref().map(|s| s.kind))
        .expect("validated by the manifest loader");
    let basis = BasisExpansion::new(&m.chart, block.basis, block.degree).map_err(usage)?;
    let result =
        fit_potential(&m.chart, kind, &basis, &block.init, &grid, &block.options).map_err(usage)?;
    let fitted = basis
        .clone()
        .with_coefficients(result.coefficients.clone())
        .map_err(usage)?;
    let f = fitted.field(&m.chart).map_err(usage)?;
    let spec = SolitonSpec::new(kind, Potential::Gradient(f), result.lambda, result.mu);
    let ev = Evaluation::with_soliton(&m.chart, &spec, &grid).map_err(usage)?;
    let mut checks = run_checks(&ev, &ev.applicable_checks(), &tol, m.chart.name())?;
    checks.command = "fit-checks";
    let code = if checks.verdicts["violated"] > 0 {
        1
    } else {
        0
    };
    let report = FitReport {
        command: "fit",
        manifold: m.chart.name().to_string(),
        kind,
        basis: BasisInfo {
            family: basis.family(),
            degree: basis.degree(),
            functions: basis.sources().to_vec(),
        },
        potential: fitted.source(),
        result,
        checks,
    };
    Ok((to_report_json(&report), code))
}

fn thread_pool() -> Result<Option<rayon::ThreadPool>, Failure> {
    let Ok(v) = std::env::var("SOLITON_THREADS") else {
        return Ok(None);
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        usage(format!(
            "SOLITON_THREADS must be a positive integer, got '{v}'"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map(Some)
        .map_err(usage)
}

/// Runs the command line `args` (including the program name); returns the
/// exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    let out = match &cli.command {
        Command::Describe(c) | Command::Fit(c) => c.out.clone(),
        Command::Check(a) => a.common.out.clone(),
        Command::Integrate(a) => a.common.out.clone(),
    };
    let dispatch = || match &cli.command {
        Command::Describe(c) => describe(c),
        Command::Check(a) => check(a),
        Command::Integrate(a) => integrate(a),
        Command::Fit(c) => fit(c),
    };
    let result = thread_pool().and_then(|pool| match pool {
        Some(p) => p.install(dispatch),
        None => dispatch(),
    });
    match result {
        Ok((json, code)) => {
            let written = match &out {
                Some(path) => std::fs::write(path, &json)
                    .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
                None => stdout.write_all(json.as_bytes()).map_err(usage),
            };
            match written {
                Ok(()) => code,
                Err(f) => {
                    let _ = writeln!(stderr, "error: {}", f.message);
                    f.code
                }
            }
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
