//! Command-line front end: `run`, `sweep-a`, `export-sigma`, `export-mesh`
//! and `check`.
//!
//! Floats are written with 17 significant digits so every CSV parses back
//! bit-for-bit. Exit codes: 0 success, 2 usage or input error, 3 numerical
//! failure.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::afem::{default_a_values, run_full, sweep_a, uniform_mesh, Mode, RunConfig, RunRecord, SigmaVariant};
use crate::analysis::stability_report;
use crate::assembly::{assemble, Discretization, RestrictedSystem};
use crate::benchmarks::{Benchmark, BenchmarkName, GVariant};
use crate::linsolve::SolverKind;
use crate::mesh::{read_mesh, write_mesh, EdgeTopology, Geometry, Mesh};
use crate::penalty::{kappa, sigma_rectangle, sigma_triangle, sigma_variable_degree, PenaltyConfig, RectangleEdge};
use crate::{Error, Result};

pub const RUN_HEADER: [&str; 7] = ["level", "ndof", "triangles", "eta", "error", "lambda1", "cond1"];

#[derive(Debug, Parser)]
#[command(name = "c0ip", version, about = "C0 interior penalty solver for the biharmonic equation")]
pub struct Cli {
    /// Log progress to stderr (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a benchmark on a sequence of meshes and print one CSV row per level.
    Run(RunArgs),
    /// Stability constant and condition estimate for a range of prefactors `a`.
    SweepA(SweepArgs),
    /// Per-edge penalty parameters of a mesh.
    ExportSigma(SigmaArgs),
    /// Write a benchmark mesh in the plain-text mesh format.
    ExportMesh(ExportMeshArgs),
    /// Mesh statistics and, with `--a`, the stability check `λ₁ ≥ 1 − 1/√a`.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON file with run settings; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub benchmark: Option<BenchmarkName>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Bulk parameter of the marking, in (0, 1].
    #[arg(long)]
    pub theta: Option<f64>,
    /// Penalty prefactor, at least 1.
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long)]
    pub max_ndof: Option<usize>,
    #[arg(long)]
    pub max_levels: Option<usize>,
    /// Compute the stability constant on every level.
    #[arg(long)]
    pub lambda1: bool,
    /// Compute the 1-norm condition estimate on every level.
    #[arg(long)]
    pub cond: bool,
    #[arg(long, value_enum)]
    pub sigma_variant: Option<SigmaVariant>,
    #[arg(long, value_enum)]
    pub solver: Option<SolverKind>,
    /// Angular function of the singular solutions.
    #[arg(long, value_enum)]
    pub g_variant: Option<GVariant>,
    /// Write the CSV here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Write `triangle,x,y,eta2` of the last level (x, y = centroid).
    #[arg(long)]
    pub export_eta: Option<PathBuf>,
    /// Write the interior system matrix of the last level as `i j value` lines.
    #[arg(long)]
    pub export_matrix: Option<PathBuf>,
}

/// Run settings read from a JSON file. Every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub benchmark: Option<BenchmarkName>,
    pub mode: Option<Mode>,
    pub theta: Option<f64>,
    pub a: Option<f64>,
    pub max_ndof: Option<usize>,
    pub max_levels: Option<usize>,
    pub compute_lambda1: Option<bool>,
    pub compute_cond: Option<bool>,
    pub sigma_variant: Option<SigmaVariant>,
    pub solver: Option<SolverKind>,
    pub g_variant: Option<GVariant>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value_t = BenchmarkName::LShape)]
    pub benchmark: BenchmarkName,
    /// Uniform refinements of the initial mesh.
    #[arg(long, default_value_t = 5)]
    pub refinements: usize,
    /// Comma-separated prefactors; default 1, 2, 4, …, 2^17.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub a_values: Option<Vec<f64>>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SigmaFormula {
    Triangle,
    /// Per-triangle degrees from `--degrees`.
    Variable,
    /// Rectangle edges from `--rectangles`.
    Rectangle,
}

#[derive(Debug, Args)]
pub struct SigmaArgs {
    /// Mesh file; otherwise `--benchmark` is used.
    #[arg(long, conflicts_with = "benchmark")]
    pub mesh: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub benchmark: Option<BenchmarkName>,
    #[arg(long, default_value_t = 0)]
    pub refinements: usize,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[arg(long, value_enum, default_value_t = SigmaFormula::Triangle)]
    pub variant: SigmaFormula,
    /// Whitespace-separated polynomial degree per triangle.
    #[arg(long)]
    pub degrees: Option<PathBuf>,
    /// One edge per line: `length area_plus [area_minus]`.
    #[arg(long)]
    pub rectangles: Option<PathBuf>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportMeshArgs {
    #[arg(long, value_enum)]
    pub benchmark: BenchmarkName,
    #[arg(long, default_value_t = 0)]
    pub refinements: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, conflicts_with = "benchmark")]
    pub mesh: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub benchmark: Option<BenchmarkName>,
    #[arg(long, default_value_t = 0)]
    pub refinements: usize,
    /// Also compute `λ₁` for this prefactor and compare with `1 − 1/√a`.
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if is_input_error(&e) {
            Failure::Usage(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn is_input_error(e: &Error) -> bool {
    match e {
        Error::AtLevel { source, .. } => is_input_error(source),
        Error::DegenerateTriangle(_)
        | Error::VertexOutOfRange { .. }
        | Error::RepeatedVertex(_)
        | Error::NonConforming(..)
        | Error::InvalidPenalty(_)
        | Error::InvalidParameter(_)
        | Error::Parse { .. }
        | Error::Io(_) => true,
        _ => false,
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing results to `out` and diagnostics to `err`. Returns the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    init_logging(cli.verbose);
    match execute(cli.command, out, err) {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
        Err(Failure::Numerical(m)) => {
            let _ = writeln!(err, "numerical failure: {m}");
            3
        }
    }
}

pub fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).format_timestamp(None).try_init();
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> std::result::Result<(), Failure> {
    match command {
        Command::Run(args) => cmd_run(args, out),
        Command::SweepA(args) => cmd_sweep(args, out),
        Command::ExportSigma(args) => cmd_export_sigma(args, out),
        Command::ExportMesh(args) => cmd_export_mesh(args, out),
        Command::Check(args) => cmd_check(args, out, err),
    }
}

fn check_prefactor(a: f64) -> std::result::Result<(), Failure> {
    if !(a >= 1.0) || !a.is_finite() {
        return Err(Failure::Usage(format!(
            "penalty prefactor must satisfy a > 1 (a = 1 is allowed with a warning), got a = {a}"
        )));
    }
    Ok(())
}

/// Applies the config file and then the flags on top of the defaults.
pub fn resolve_run_config(args: &RunArgs) -> Result<RunConfig> {
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str::<ConfigFile>(&text).map_err(|e| Error::Parse {
                line: e.line(),
                message: format!("{}: {e}", path.display()),
            })?
        }
        None => ConfigFile::default(),
    };
    let d = RunConfig::default();
    Ok(RunConfig {
        benchmark: args.benchmark.or(file.benchmark).unwrap_or(d.benchmark),
        mode: args.mode.or(file.mode).unwrap_or(d.mode),
        theta: args.theta.or(file.theta).unwrap_or(d.theta),
        a: args.a.or(file.a).unwrap_or(d.a),
        max_ndof: args.max_ndof.or(file.max_ndof).unwrap_or(d.max_ndof),
        max_levels: args.max_levels.or(file.max_levels).unwrap_or(d.max_levels),
        compute_lambda1: args.lambda1 || file.compute_lambda1.unwrap_or(d.compute_lambda1),
        compute_cond: args.cond || file.compute_cond.unwrap_or(d.compute_cond),
        sigma_variant: args.sigma_variant.or(file.sigma_variant).unwrap_or(d.sigma_variant),
        solver: args.solver.or(file.solver).unwrap_or(d.solver),
        g_variant: args.g_variant.or(file.g_variant).unwrap_or(d.g_variant),
    })
}

fn with_output(
    path: &Option<PathBuf>,
    out: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> std::result::Result<(), Failure>,
) -> std::result::Result<(), Failure> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            body(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => body(out),
    }
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn write_run_csv(records: &[RunRecord], w: &mut dyn Write) -> std::result::Result<(), csv::Error> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(RUN_HEADER)?;
    for r in records {
        csv.write_record([
            r.level.to_string(),
            r.ndof.to_string(),
            r.triangles.to_string(),
            fmt_f64(r.eta),
            fmt_opt(r.error),
            fmt_opt(r.lambda1),
            fmt_opt(r.cond1),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

/// Reads the output of `run` back into records.
pub fn parse_run_csv<R: Read>(reader: R) -> Result<Vec<RunRecord>> {
    let mut csv = csv::Reader::from_reader(reader);
    let header = csv.headers().map_err(csv_parse_error)?.clone();
    if header.iter().ne(RUN_HEADER) {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected header {:?}", header.iter().collect::<Vec<_>>()),
        });
    }
    let mut records = Vec::new();
    for (i, row) in csv.records().enumerate() {
        let row = row.map_err(csv_parse_error)?;
        let line = i + 2;
        let bad = |field: &str| Error::Parse {
            line,
            message: format!("invalid {field}"),
        };
        let int = |k: usize| row[k].parse::<usize>().map_err(|_| bad(RUN_HEADER[k]));
        let opt = |k: usize| -> Result<Option<f64>> {
            if row[k].is_empty() {
                Ok(None)
            } else {
                row[k].parse::<f64>().map(Some).map_err(|_| bad(RUN_HEADER[k]))
            }
        };
        records.push(RunRecord {
            level: int(0)?,
            ndof: int(1)?,
            triangles: int(2)?,
            eta: row[3].parse().map_err(|_| bad("eta"))?,
            error: opt(4)?,
            lambda1: opt(5)?,
            cond1: opt(6)?,
        });
    }
    Ok(records)
}

fn csv_parse_error(e: csv::Error) -> Error {
    Error::Parse {
        line: e.position().map_or(0, |p| p.line() as usize),
        message: e.to_string(),
    }
}

fn cmd_run(args: RunArgs, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let config = resolve_run_config(&args)?;
    check_prefactor(config.a)?;
    let output = run_full(&config)?;
    with_output(&args.output, out, |w| Ok(write_run_csv(&output.records, w)?))?;

    if let Some(path) = &args.export_eta {
        let mut csv = csv::Writer::from_path(path)?;
        csv.write_record(["triangle", "x", "y", "eta2"])?;
        for (t, e) in output.eta2.iter().enumerate() {
            let c = output.mesh.centroid(t);
            csv.write_record([t.to_string(), fmt_f64(c[0]), fmt_f64(c[1]), fmt_f64(*e)])?;
        }
        csv.flush()?;
    }
    if let Some(path) = &args.export_matrix {
        let benchmark = Benchmark::new(config.benchmark, config.g_variant);
        let disc = Discretization::new(&output.mesh)?;
        let penalty = crate::afem::penalty_for(&disc, config.sigma_variant, config.a)?;
        let system = assemble(&output.mesh, &disc, &penalty.sigma, &|p| benchmark.rhs(p))?;
        let restricted = RestrictedSystem::new(&system, &disc.dofs);
        restricted.system.write_coo(BufWriter::new(File::create(path)?))?;
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let a_values = args.a_values.clone().unwrap_or_else(default_a_values);
    if a_values.is_empty() {
        return Err(Failure::Usage("no values of a given".into()));
    }
    for &a in &a_values {
        check_prefactor(a)?;
    }
    let mesh = uniform_mesh(args.benchmark, args.refinements)?;
    let rows = sweep_a(&mesh, &a_values)?;
    with_output(&args.output, out, |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["a", "ndof", "lambda1", "cond1"])?;
        for r in &rows {
            csv.write_record([fmt_f64(r.a), r.ndof.to_string(), fmt_f64(r.lambda1), fmt_f64(r.cond1)])?;
        }
        csv.flush()?;
        Ok(())
    })
}

fn load_mesh(path: &Option<PathBuf>, benchmark: Option<BenchmarkName>, refinements: usize) -> Result<Mesh> {
    match (path, benchmark) {
        (Some(p), _) => {
            let mut mesh = read_mesh(BufReader::new(File::open(p)?))?;
            for _ in 0..refinements {
                mesh = crate::mesh::refine_uniform(&mesh)?;
            }
            Ok(mesh)
        }
        (None, Some(b)) => uniform_mesh(b, refinements),
        (None, None) => Err(Error::InvalidParameter("either --mesh or --benchmark is required".into())),
    }
}

fn read_numbers<T: std::str::FromStr>(path: &Path) -> Result<Vec<Vec<T>>> {
    let reader = BufReader::new(File::open(path)?);
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|s| s.parse::<T>())
            .collect::<std::result::Result<Vec<T>, _>>()
            .map_err(|_| Error::Parse {
                line: i + 1,
                message: format!("invalid number in {}", path.display()),
            })?;
        rows.push(row);
    }
    Ok(rows)
}

fn cmd_export_sigma(args: SigmaArgs, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    check_prefactor(args.a)?;
    let cfg = PenaltyConfig { a: args.a, k: args.k };

    if args.variant == SigmaFormula::Rectangle {
        let path = args
            .rectangles
            .as_ref()
            .ok_or_else(|| Failure::Usage("--variant rectangle requires --rectangles".into()))?;
        let mut edges = Vec::new();
        for (i, row) in read_numbers::<f64>(path)?.into_iter().enumerate() {
            if !(row.len() == 2 || row.len() == 3) {
                return Err(Failure::Usage(format!("rectangle edge {i}: expected 2 or 3 numbers")));
            }
            edges.push(RectangleEdge {
                length: row[0],
                area_plus: row[1],
                area_minus: row.get(2).copied(),
            });
        }
        let field = sigma_rectangle(&cfg, &edges)?;
        return with_output(&args.output, out, |w| {
            let mut csv = csv::Writer::from_writer(w);
            csv.write_record(["edge", "v0", "v1", "interior", "sigma"])?;
            for (s, (e, sigma)) in edges.iter().zip(&field.sigma).enumerate() {
                let interior = e.area_minus.is_some();
                csv.write_record([s.to_string(), String::new(), String::new(), interior.to_string(), fmt_f64(*sigma)])?;
            }
            csv.flush()?;
            Ok(())
        });
    }

    let mesh = load_mesh(&args.mesh, args.benchmark, args.refinements)?;
    let topo = EdgeTopology::build(&mesh)?;
    let geom = Geometry::compute(&mesh, &topo);
    let field = match args.variant {
        SigmaFormula::Triangle => sigma_triangle(&cfg, &geom, &topo)?,
        _ => {
            let path = args
                .degrees
                .as_ref()
                .ok_or_else(|| Failure::Usage("--variant variable requires --degrees".into()))?;
            let degrees: Vec<u32> = read_numbers::<u32>(path)?.into_iter().flatten().collect();
            sigma_variable_degree(args.a, &degrees, &geom, &topo)?
        }
    };
    with_output(&args.output, out, |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["edge", "v0", "v1", "interior", "sigma"])?;
        for (s, sigma) in field.sigma.iter().enumerate() {
            let [v0, v1] = topo.edge_vertices[s];
            csv.write_record([
                s.to_string(),
                v0.to_string(),
                v1.to_string(),
                topo.is_interior[s].to_string(),
                fmt_f64(*sigma),
            ])?;
        }
        csv.flush()?;
        Ok(())
    })
}

fn cmd_export_mesh(args: ExportMeshArgs, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let mesh = uniform_mesh(args.benchmark, args.refinements)?;
    with_output(&args.output, out, |w| Ok(write_mesh(&mesh, w)?))
}

fn cmd_check(args: CheckArgs, out: &mut dyn Write, err: &mut dyn Write) -> std::result::Result<(), Failure> {
    let mesh = load_mesh(&args.mesh, args.benchmark, args.refinements)?;
    let disc = Discretization::new(&mesh)?;
    writeln!(out, "vertices,{}", mesh.num_vertices())?;
    writeln!(out, "triangles,{}", mesh.num_triangles())?;
    writeln!(out, "edges,{}", disc.topo.num_edges())?;
    writeln!(out, "interior_edges,{}", disc.topo.num_interior_edges())?;
    writeln!(out, "ndof,{}", disc.dofs.ndof())?;
    writeln!(out, "area,{}", fmt_f64(mesh.total_area()))?;
    writeln!(out, "min_angle_deg,{}", fmt_f64(mesh.min_angle().to_degrees()))?;

    let Some(a) = args.a else { return Ok(()) };
    check_prefactor(a)?;
    if disc.dofs.ndof() == 0 {
        return Err(Failure::Usage("mesh has no interior degrees of freedom".into()));
    }
    let penalty = sigma_triangle(&PenaltyConfig { a, k: 2 }, &disc.geom, &disc.topo)?;
    let system = assemble(&mesh, &disc, &penalty.sigma, &|_| 0.0)?;
    let restricted = RestrictedSystem::new(&system, &disc.dofs);
    let report = stability_report(&restricted.system, &restricted.norm, kappa(a))?;
    writeln!(out, "lambda1,{}", fmt_f64(report.lambda1))?;
    writeln!(out, "kappa,{}", fmt_f64(report.kappa))?;
    writeln!(out, "cond1,{}", fmt_f64(report.cond1))?;
    if report.lambda1 < report.kappa - 1e-9 {
        writeln!(err, "stability bound violated: lambda1 = {} < {}", report.lambda1, report.kappa)?;
        return Err(Failure::Numerical("lambda1 below 1 - 1/sqrt(a)".into()));
    }
    Ok(())
}

/// Process entry point used by the binary.
pub fn main() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    main_with_args(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
