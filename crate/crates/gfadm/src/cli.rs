//! Command-line front end.
//!
//! Exit codes: 0 success, 1 input error, 2 numeric error, 3 oracle error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use gfadm_core::analysis::{convergence_estimate, max_residual, residual_report, LipschitzBox};
use gfadm_core::{fd_solve, gfadm_solve, AnalysisError, OracleError, SolutionSeries, SolveError};

use crate::problem::{load_problem, parse_form, parse_method, BackendChoice, Problem, ProblemFileError};
use crate::report;
use crate::{bundled, OUT_DIR_ENV};

#[derive(Debug, Parser)]
#[command(name = "gfadm", version, about = "Series solutions of coupled Lane-Emden boundary value problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Partial sums ψ₁ₙ, ψ₂ₙ at the abscissae (CSV; JSON coefficients for the poly backend).
    Solve(SolveArgs),
    /// Pointwise and maximum residuals for each n.
    Residual(ResidualArgs),
    /// Kernel bound m, Lipschitz constants, γ and truncation bounds.
    Bound(BoundArgs),
    /// Deviation between the series and the finite-difference oracle.
    Compare(CompareArgs),
    /// Solve and residual timings for several problems.
    Bench(BenchArgs),
    /// Names of the bundled problems.
    List,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Problem file, or the name of a bundled problem.
    pub problem: String,
    #[arg(long, value_parser = clap::value_parser!(BackendChoice))]
    pub backend: Option<BackendChoice>,
    /// Chebyshev degree of the grid backend.
    #[arg(long)]
    pub grid_size: Option<usize>,
    /// Output file; defaults to $GFADM_OUT_DIR/<name>_<command>.csv, else stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl clap::builder::ValueParserFactory for BackendChoice {
    type Parser = clap::builder::ValueParser;

    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| s.parse::<BackendChoice>())
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: Common,
    /// Truncation order n.
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated abscissae (default 0.1,…,0.9).
    #[arg(long, value_parser = parse_reals_arg)]
    pub abscissae: Option<Reals>,
}

#[derive(Debug, Args)]
pub struct ResidualArgs {
    #[command(flatten)]
    pub common: Common,
    /// Orders, e.g. "2-11" or "2,4,6" (default 2 to the file's n_terms).
    #[arg(long, value_parser = parse_orders_arg)]
    pub n: Option<Orders>,
    #[arg(long, value_parser = parse_reals_arg)]
    pub abscissae: Option<Reals>,
    /// identity or spectral.
    #[arg(long, value_parser = parse_method)]
    pub method: Option<gfadm_core::ResidualMethod>,
    /// plain or divergence.
    #[arg(long, value_parser = parse_form)]
    pub form: Option<gfadm_core::MaxResidualForm>,
    /// Search interval "lo,hi".
    #[arg(long, value_parser = parse_pair)]
    pub interval: Option<(f64, f64)>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_parser = parse_orders_arg)]
    pub n: Option<Orders>,
    /// Lattice points per axis for the Lipschitz estimate.
    #[arg(long, default_value_t = 9)]
    pub samples: usize,
    /// Lipschitz box "y1lo,y1hi,y2lo,y2hi" (default: range of the iterates, padded 10%).
    #[arg(long = "box", value_parser = parse_box)]
    pub lipschitz_box: Option<LipschitzBox>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub n: Option<usize>,
    /// Oracle intervals.
    #[arg(long, default_value_t = 512)]
    pub m: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 50)]
    pub max_iters: usize,
    #[arg(long, value_parser = parse_reals_arg)]
    pub abscissae: Option<Reals>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Problem files or bundled names (default: all bundled problems).
    pub problems: Vec<String>,
    /// Runs per problem; the fastest is reported.
    #[arg(long, default_value_t = 3)]
    pub repeat: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Oracle(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Oracle(_) => 3,
        }
    }
}

impl From<ProblemFileError> for CliError {
    fn from(e: ProblemFileError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Input(format!("output: {e}"))
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::InvalidProblem { .. }
            | SolveError::UnsupportedBackend(_)
            | SolveError::TermOutOfRange { .. }
            | SolveError::OutsideDomain(_) => CliError::Input(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Solve(s) => s.into(),
            AnalysisError::InvalidArgument(_) => CliError::Input(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::InvalidProblem(s) => s.into(),
            OracleError::TooFewIntervals(_) => CliError::Input(e.to_string()),
            _ => CliError::Oracle(e.to_string()),
        }
    }
}

/// A comma-separated list of reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Reals(pub Vec<f64>);

/// A list of truncation orders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orders(pub Vec<usize>);

fn parse_reals_arg(s: &str) -> Result<Reals, String> {
    parse_reals(s).map(Reals)
}

fn parse_orders_arg(s: &str) -> Result<Orders, String> {
    parse_orders(s).map(Orders)
}

fn parse_reals(s: &str) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("{t:?} is not a number")))
        .collect::<Result<_, _>>()?;
    if v.is_empty() {
        return Err("empty list".into());
    }
    Ok(v)
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    match parse_reals(s)?.as_slice() {
        &[a, b] => Ok((a, b)),
        _ => Err("expected two numbers \"lo,hi\"".into()),
    }
}

fn parse_box(s: &str) -> Result<LipschitzBox, String> {
    match parse_reals(s)?.as_slice() {
        &[a, b, c, d] if a <= b && c <= d => Ok(LipschitzBox { x: (0.0, 1.0), y1: (a, b), y2: (c, d) }),
        _ => Err("expected \"y1lo,y1hi,y2lo,y2hi\" with lo <= hi".into()),
    }
}

/// `"2-11"`, `"3"`, `"2,4,6-8"`.
pub fn parse_orders(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("{t:?} is not a non-negative integer"));
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b)?);
                if a > b {
                    return Err(format!("empty range {part:?}"));
                }
                out.extend(a..=b);
            }
            None => out.push(num(part)?),
        }
    }
    Ok(out)
}

fn default_abscissae() -> Vec<f64> {
    (1..=9).map(|k| k as f64 / 10.0).collect()
}

/// Where a command's main table goes.
enum Sink {
    Stdout,
    File(PathBuf),
}

impl Sink {
    fn resolve(out: Option<&Path>, name: &str, command: &str) -> Sink {
        if let Some(p) = out {
            return Sink::File(p.to_path_buf());
        }
        match std::env::var_os(OUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => Sink::File(Path::new(&dir).join(format!("{name}_{command}.csv"))),
            _ => Sink::Stdout,
        }
    }

    /// A file beside the main one, `<stem><suffix>`.
    fn sibling(&self, suffix: &str) -> Sink {
        match self {
            Sink::Stdout => Sink::Stdout,
            Sink::File(p) => {
                let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
                Sink::File(p.with_file_name(format!("{stem}{suffix}")))
            }
        }
    }

    fn write(&self, stdout: &mut dyn Write, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), CliError> {
        match self {
            Sink::Stdout => body(stdout)?,
            Sink::File(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir)?;
                }
                let mut w = BufWriter::new(File::create(p)?);
                body(&mut w)?;
                w.flush()?;
            }
        }
        Ok(())
    }
}

fn configure(common: &Common) -> Result<Problem, CliError> {
    let mut problem = load_problem(&common.problem)?;
    if let Some(b) = common.backend {
        problem.run.backend = b;
    }
    if let Some(g) = common.grid_size {
        if g < 2 {
            return Err(CliError::Input("--grid-size must be at least 2".into()));
        }
        problem.run.grid_size = g;
    }
    Ok(problem)
}

fn solve(problem: &Problem, n: usize) -> Result<SolutionSeries, CliError> {
    Ok(gfadm_solve(&problem.spec, n, problem.run.backend())?)
}

pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(a) => cmd_solve(a, stdout),
        Command::Residual(a) => cmd_residual(a, stdout),
        Command::Bound(a) => cmd_bound(a, stdout, stderr),
        Command::Compare(a) => cmd_compare(a, stdout),
        Command::Bench(a) => cmd_bench(a, stdout),
        Command::List => {
            for name in bundled::names() {
                let p = load_problem(name)?;
                writeln!(stdout, "{name}\t{}", p.description.unwrap_or_default())?;
            }
            Ok(())
        }
    }
}

fn cmd_solve(a: SolveArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let problem = configure(&a.common)?;
    let n = a.n.unwrap_or(problem.run.n_terms);
    let sol = solve(&problem, n)?;
    let xs = a.abscissae.map_or_else(default_abscissae, |r| r.0);
    let rows = xs
        .iter()
        .map(|&x| sol.evaluate_partial_sum(n, x).map(|(p, q)| (x, p, q)))
        .collect::<Result<Vec<_>, _>>()?;
    let sink = Sink::resolve(a.common.out.as_deref(), &problem.spec.name, "solve");
    sink.write(stdout, |w| report::write_solution(w, &rows))?;
    if let Some(json) = report::polynomial_json(&sol, n) {
        let json_sink = sink.sibling(".json");
        json_sink.write(stdout, |w| {
            if matches!(json_sink, Sink::Stdout) {
                writeln!(w)?;
            }
            serde_json::to_writer_pretty(&mut *w, &json)?;
            writeln!(w)
        })?;
    }
    Ok(())
}

fn cmd_residual(a: ResidualArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let problem = configure(&a.common)?;
    let ns = a.n.map(|o| o.0).unwrap_or_else(|| (2.min(problem.run.n_terms)..=problem.run.n_terms).collect());
    let mut opts = problem.run.residual;
    if let Some(m) = a.method {
        opts.method = m;
    }
    if let Some(f) = a.form {
        opts.form = f;
    }
    if let Some(i) = a.interval {
        opts.interval = i;
    }
    let sol = solve(&problem, ns.iter().copied().max().unwrap_or(0))?;
    let xs = a.abscissae.map_or_else(default_abscissae, |r| r.0);
    let rep = residual_report(&sol, &ns, &xs, &opts)?;
    let sink = Sink::resolve(a.common.out.as_deref(), &problem.spec.name, "residual");
    sink.write(stdout, |w| report::write_max_residuals(w, &rep.maxima))?;
    let points = sink.sibling("_points.csv");
    points.write(stdout, |w| {
        if matches!(points, Sink::Stdout) {
            writeln!(w)?;
        }
        report::write_residual_points(w, &rep.points)
    })
}

fn cmd_bound(a: BoundArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let problem = configure(&a.common)?;
    let ns = a.n.map(|o| o.0).unwrap_or_else(|| (0..=problem.run.n_terms).collect());
    let sol = solve(&problem, problem.run.n_terms)?;
    let est = convergence_estimate(&sol, &ns, a.lipschitz_box, a.samples)?;
    if est.gamma >= 1.0 {
        writeln!(stderr, "warning: gamma = {:.6} >= 1, the truncation bound does not apply", est.gamma)?;
    }
    let sink = Sink::resolve(a.common.out.as_deref(), &problem.spec.name, "bound");
    sink.write(stdout, |w| {
        writeln!(w, "problem = {}", problem.spec.name)?;
        writeln!(w, "m1 = {:.6}", est.m_components[0])?;
        writeln!(w, "m2 = {:.6}", est.m_components[1])?;
        writeln!(w, "m = {:.6}", est.m)?;
        writeln!(w, "l1 = {:.6}", est.l1)?;
        writeln!(w, "l2 = {:.6}", est.l2)?;
        writeln!(w, "l = {:.6}", est.l)?;
        writeln!(w, "gamma = {:.6}", est.gamma)?;
        writeln!(w, "max_f0 = {:.6}", est.max_f0)?;
        writeln!(w, "n,bound")?;
        for (n, b) in &est.bounds {
            match b {
                Some(b) => writeln!(w, "{n},{}", report::fmt_residual(*b))?,
                None => writeln!(w, "{n},inapplicable")?,
            }
        }
        Ok(())
    })
}

fn cmd_compare(a: CompareArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let problem = configure(&a.common)?;
    let n = a.n.unwrap_or(problem.run.n_terms);
    let xs = a.abscissae.map_or_else(default_abscissae, |r| r.0);

    let t0 = Instant::now();
    let sol = solve(&problem, n)?;
    let series = xs.iter().map(|&x| sol.evaluate_partial_sum(n, x)).collect::<Result<Vec<_>, _>>()?;
    let series_time = t0.elapsed().as_secs_f64();

    let t0 = Instant::now();
    let oracle = fd_solve(&problem.spec, a.m, a.tol, a.max_iters)?;
    let oracle_time = t0.elapsed().as_secs_f64();

    let mut deviation = 0.0f64;
    let sink = Sink::resolve(a.common.out.as_deref(), &problem.spec.name, "compare");
    sink.write(stdout, |w| {
        writeln!(w, "x,psi1,psi2,oracle1,oracle2")?;
        for (&x, &(p, q)) in xs.iter().zip(&series) {
            let (o1, o2) = (oracle.eval(0, x), oracle.eval(1, x));
            deviation = deviation.max((p - o1).abs()).max((q - o2).abs());
            writeln!(
                w,
                "{x},{},{},{},{}",
                report::fmt_value(p),
                report::fmt_value(q),
                report::fmt_value(o1),
                report::fmt_value(o2)
            )?;
        }
        Ok(())
    })?;
    writeln!(stdout, "max_deviation = {}", report::fmt_residual(deviation))?;
    writeln!(stdout, "series_seconds = {series_time:.4}")?;
    writeln!(stdout, "oracle_seconds = {oracle_time:.4} ({} Newton iterations, M = {})", oracle.iterations, a.m)?;
    Ok(())
}

fn cmd_bench(a: BenchArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let names: Vec<String> = if a.problems.is_empty() { bundled::names().map(String::from).collect() } else { a.problems };
    let repeat = a.repeat.max(1);
    let mut rows = Vec::with_capacity(names.len());
    for name in &names {
        let problem = load_problem(name)?;
        let n = problem.run.n_terms;
        let (mut solve_s, mut residual_s) = (f64::INFINITY, f64::INFINITY);
        let mut maxr = [0.0; 2];
        for _ in 0..repeat {
            let t0 = Instant::now();
            let sol = solve(&problem, n)?;
            solve_s = solve_s.min(t0.elapsed().as_secs_f64());
            let t0 = Instant::now();
            maxr = max_residual(&sol, n, &problem.run.residual)?;
            residual_s = residual_s.min(t0.elapsed().as_secs_f64());
        }
        let backend = match problem.run.backend {
            BackendChoice::Grid => "grid",
            BackendChoice::Poly => "poly",
        };
        rows.push((problem.spec.name, n, backend, problem.run.grid_size, solve_s, residual_s, maxr));
    }
    let sink = Sink::resolve(a.out.as_deref(), "bench", "bench");
    sink.write(stdout, |w| {
        writeln!(w, "problem,n,backend,grid_size,solve_ms,residual_ms,maxr1,maxr2")?;
        for (name, n, backend, g, s, r, m) in &rows {
            writeln!(
                w,
                "{name},{n},{backend},{g},{:.3},{:.3},{},{}",
                s * 1e3,
                r * 1e3,
                report::fmt_residual(m[0]),
                report::fmt_residual(m[1])
            )?;
        }
        Ok(())
    })
}

/// Parses arguments, runs, reports errors on stderr and returns the exit
/// code.
pub fn main_with_args(args: impl IntoIterator<Item = std::ffi::OsString>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut err = io::stderr();
    match run(cli, &mut out, &mut err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = out.flush();
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
