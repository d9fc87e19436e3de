//! Command-line front end.
//!
//! Every number printed here comes straight from the library; this module
//! only parses flags, routes calls and formats output.
//!
//! A `--config <file>` of `key = value` lines supplies defaults for any long
//! flag of the chosen command (`command = <name>` picks the command itself).
//! Flags given on the command line win over the file.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{
    average_bound, comparison_surface, evaluate_grid, n_dependence, ndep_sizes, optimistic_reference, pac_bound,
    BoundKind, BoundSpec, Correction, SurfaceGrid,
};
use crate::conjugate::{numeric_conjugate, CgfHandle};
use crate::error::Error;
use crate::families::{Family, Sidedness};
use crate::inversion::{BoundResult, Comparator};
use crate::search::{linspace, logspace};
use crate::upsilon::{
    upsilon_bernoulli_exact, upsilon_monte_carlo, upsilon_quadrature, upsilon_series, RGrid,
};
use crate::verify::{
    average_check, certified_kinds, conjugate_check, identity_suites, run_samplewise_comparison, run_suite,
    run_trials_multi, IdentityCheck, SuiteConfig, SyntheticProblem,
};
use crate::CONJUGATE_TOL;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NO_FINITE_BOUND: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_CHECK_FAILED: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "cgf-bounds", version, about = "Generalization bounds with Cramér-function comparators")]
pub struct Cli {
    /// Seed of all random streams.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// `key = value` file of default flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one bound.
    Bound(BoundArgs),
    /// Evaluate bounds on an (alpha, beta/n) grid and write CSV.
    Sweep(SweepArgs),
    /// Bound as a function of n at fixed (alpha, beta), as CSV.
    Ndep(NdepArgs),
    /// Compute ln Υ of a comparator.
    Upsilon(UpsilonArgs),
    /// Monte-Carlo validity checks on synthetic problems.
    Verify(VerifyArgs),
    /// Compare closed-form Cramér functions with the numeric conjugate.
    ConjugateCheck(ConjugateArgs),
    /// Run all identity suites.
    Selfcheck,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub family: Family,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub n: u64,
    /// Confidence level; omit for the average bound.
    #[arg(long)]
    pub delta: Option<f64>,
    /// one | xi | 2eceil[=u] | chernoff=<ln_upsilon>
    #[arg(long)]
    pub correction: Option<Correction>,
    /// Evaluate a named bound kind instead.
    #[arg(long)]
    pub kind: Option<BoundKind>,
    /// Variance proxy of subgaussian_diff_inf.
    #[arg(long)]
    pub sigma2: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub family: Family,
    /// Comma-separated bound kinds; `diff` is the first minus the second.
    #[arg(long, value_delimiter = ',', required = true)]
    pub kinds: Vec<BoundKind>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_max: f64,
    #[arg(long, default_value_t = 50)]
    pub alpha_steps: usize,
    #[arg(long)]
    pub beta_min: f64,
    #[arg(long)]
    pub beta_max: f64,
    #[arg(long, default_value_t = 50)]
    pub beta_steps: usize,
    #[arg(long, value_enum, default_value_t = Scale::Linear)]
    pub beta_scale: Scale,
    #[arg(long)]
    pub n: u64,
    /// Confidence level of the PAC kinds.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Clamp both bounds at 1.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", default_value_t = false)]
    pub clamp: bool,
    #[arg(long)]
    pub sigma2: Option<f64>,
    #[arg(long)]
    pub ln_upsilon: Option<f64>,
    #[arg(long)]
    pub u: Option<f64>,
}

#[derive(Debug, Args)]
pub struct NdepArgs {
    #[arg(long)]
    pub family: Family,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub nmin: u64,
    #[arg(long)]
    pub nmax: u64,
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    #[arg(long, default_value = "average_cramer")]
    pub kind: BoundKind,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub sigma2: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UpsilonMethod {
    Auto,
    Exact,
    Series,
    Quadrature,
    Mc,
}

#[derive(Debug, Args)]
pub struct UpsilonArgs {
    /// kl | cramer | catoni:gamma=<g> | scaled_diff:t=<t> | poisson_diff:t=<t> |
    /// laplace_diff:t=<t> | parametric:t=<t>
    #[arg(long)]
    pub comparator: String,
    #[arg(long)]
    pub family: Family,
    #[arg(long)]
    pub n: u64,
    #[arg(long, value_enum, default_value_t = UpsilonMethod::Auto)]
    pub method: UpsilonMethod,
    /// Points of the grid of means.
    #[arg(long)]
    pub r_points: Option<usize>,
    #[arg(long, default_value_t = 1e-10)]
    pub eps: f64,
    /// Monte Carlo draws per mean.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyMode {
    Trials,
    Suite,
    Average,
    Samplewise,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = VerifyMode::Trials)]
    pub mode: VerifyMode,
    #[arg(long, default_value = "bernoulli")]
    pub family: Family,
    /// Bound kind (default: every certified kind of the family).
    #[arg(long)]
    pub bound: Option<BoundKind>,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    #[arg(long, default_value_t = 2000)]
    pub trials: usize,
    /// Number of hypotheses.
    #[arg(long, default_value_t = 10)]
    pub m: usize,
    #[arg(long, default_value_t = 50)]
    pub n: u64,
    /// Gibbs temperature.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Outer draws of the samplewise comparison.
    #[arg(long, default_value_t = 400)]
    pub outer: usize,
    /// Inner draws of the samplewise comparison.
    #[arg(long, default_value_t = 1000)]
    pub inner: usize,
}

#[derive(Debug, Args)]
pub struct ConjugateArgs {
    /// Family to check (default: all seven).
    #[arg(long)]
    pub family: Option<Family>,
    #[arg(long, allow_hyphen_values = true, requires = "p")]
    pub q: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "q")]
    pub p: Option<f64>,
    #[arg(long, value_enum, default_value_t = Side::Full)]
    pub sided: Side,
    #[arg(long, default_value_t = 20)]
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Full,
    Nonneg,
}

/// A failure with its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: msg.into(),
        }
    }

    fn failed(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_CHECK_FAILED,
            message: msg.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoFiniteBound(_) | Error::CorrectionDivergent(_) | Error::Divergent { .. } => EXIT_NO_FINITE_BOUND,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Self {
            code: EXIT_IO,
            message: format!("I/O error: {e}"),
        }
    }
}

type CliResult<T = ()> = std::result::Result<T, CliError>;

/// Formats a float with 9 significant digits, printed in shortest form.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r: f64 = format!("{x:.8e}").parse().unwrap_or(x);
    if r == 0.0 || (1e-5..1e16).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("config line {}: expected key = value", i + 1)))?;
        out.push((k.trim().replace('_', "-"), v.trim().to_string()));
    }
    Ok(out)
}

const GLOBAL_VALUED: [&str; 4] = ["--seed", "--threads", "--out", "--config"];

fn flag_name(tok: &str) -> Option<&str> {
    tok.strip_prefix("--").map(|t| t.split('=').next().unwrap_or(t))
}

const COMMANDS: [&str; 8] = ["bound", "sweep", "ndep", "upsilon", "verify", "conjugate-check", "selfcheck", "help"];

/// Position of the subcommand token, skipping global flags and their values.
fn subcommand_index(args: &[String]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let a = &args[i];
        if GLOBAL_VALUED.contains(&a.as_str()) {
            i += 2;
        } else if COMMANDS.contains(&a.as_str()) {
            return Some(i);
        } else {
            i += 1;
        }
    }
    None
}

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

/// Inserts config entries not already given on the command line right after
/// the subcommand.
pub fn merge_config(mut args: Vec<String>, entries: &[(String, String)]) -> CliResult<Vec<String>> {
    let present: Vec<String> = args.iter().filter_map(|a| flag_name(a)).map(str::to_string).collect();
    let idx = match subcommand_index(&args) {
        Some(i) => i,
        None => {
            let cmd = entries
                .iter()
                .find(|(k, _)| k == "command")
                .ok_or_else(|| CliError::usage("no command given"))?;
            args.insert(1, cmd.1.clone());
            1
        }
    };
    let extra: Vec<String> = entries
        .iter()
        .filter(|(k, _)| k != "command" && k != "config" && !present.contains(k))
        .map(|(k, v)| format!("--{k}={v}"))
        .collect();
    args.splice(idx + 1..idx + 1, extra);
    Ok(args)
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<String> = args.into_iter().map(|a| a.into().to_string_lossy().into_owned()).collect();
    match run_inner(args) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            if !e.message.is_empty() {
                eprintln!("error: {}", e.message);
            }
            e.code
        }
    }
}

fn run_inner(mut args: Vec<String>) -> CliResult {
    if let Some(path) = config_path(&args) {
        let text = std::fs::read_to_string(&path).map_err(|e| CliError {
            code: EXIT_IO,
            message: format!("cannot read config {path}: {e}"),
        })?;
        args = merge_config(args, &parse_config(&text)?)?;
    }
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return Err(CliError {
                code,
                message: String::new(),
            });
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(CliError::usage("--threads must be positive"));
        }
        pool = pool.num_threads(k);
    }
    let pool = pool.build().map_err(|e| CliError::usage(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(&cli))
}

fn open_out(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError {
            code: EXIT_IO,
            message: format!("cannot create {}: {e}", p.display()),
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn dispatch(cli: &Cli) -> CliResult {
    let mut out = open_out(cli.out.as_deref())?;
    match &cli.command {
        Command::Bound(a) => cmd_bound(a, &mut out)?,
        Command::Sweep(a) => cmd_sweep(a, &mut out)?,
        Command::Ndep(a) => cmd_ndep(a, &mut out)?,
        Command::Upsilon(a) => cmd_upsilon(a, cli.seed, &mut out)?,
        Command::Verify(a) => {
            let r = cmd_verify(a, cli.seed, &mut out);
            out.flush()?;
            return r;
        }
        Command::ConjugateCheck(a) => {
            let r = cmd_conjugate(a, &mut out);
            out.flush()?;
            return r;
        }
        Command::Selfcheck => {
            let r = report_checks(&identity_suites(), &mut out);
            out.flush()?;
            return r;
        }
    }
    out.flush()?;
    Ok(())
}

fn bound_line(r: &BoundResult) -> String {
    let mut s = format!("rho={} budget={} status={}", fmt_num(r.rho), fmt_num(r.budget), r.status);
    if r.reference_only {
        s.push_str(" reference_only=true");
    }
    s
}

fn cmd_bound(a: &BoundArgs, out: &mut dyn Write) -> CliResult {
    let r = if let Some(kind) = a.kind {
        let mut spec = BoundSpec::new(kind, a.family);
        spec.delta = a.delta;
        spec.sigma2 = a.sigma2;
        match a.correction {
            Some(Correction::Chernoff { ln_upsilon }) => spec.ln_upsilon = Some(ln_upsilon),
            Some(Correction::TwoECeil { u }) if !u.is_nan() => spec.u = Some(u),
            _ => {}
        }
        spec.evaluate(a.alpha, a.beta, a.n)?
    } else {
        match (a.delta, a.correction) {
            (None, None) => average_bound(a.family, a.alpha, a.beta, a.n)?,
            (None, Some(_)) => return Err(CliError::usage("--correction needs --delta")),
            (Some(d), Some(Correction::One)) => optimistic_reference(a.family, a.alpha, a.beta, a.n, Some(d))?,
            (Some(d), Some(c)) => pac_bound(a.family, a.alpha, a.beta, a.n, d, c)?,
            (Some(d), None) if a.family == Family::Bernoulli => BoundSpec::new(BoundKind::PacCramerChernoff, a.family)
                .with_delta(d)
                .evaluate(a.alpha, a.beta, a.n)?,
            (Some(d), None) => pac_bound(a.family, a.alpha, a.beta, a.n, d, Correction::Xi)?,
        }
    };
    writeln!(out, "{}", bound_line(&r))?;
    Ok(())
}

/// Grid specification of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub alpha_range: (f64, f64, usize),
    pub beta_over_n_range: (f64, f64, usize, Scale),
    pub n: u64,
    pub kinds: Vec<BoundKind>,
    pub family: Family,
}

impl SweepSpec {
    pub fn validate(&self) -> CliResult {
        let (alo, ahi, asteps) = self.alpha_range;
        let (blo, bhi, bsteps, scale) = self.beta_over_n_range;
        if asteps < 2 || bsteps < 2 {
            return Err(CliError::usage("grid steps must be at least 2"));
        }
        if !(alo < ahi) || !(blo < bhi) {
            return Err(CliError::usage("grid ranges must be increasing"));
        }
        if blo < 0.0 || (scale == Scale::Log && blo <= 0.0) {
            return Err(CliError::usage("beta/n must be nonnegative (positive on a log scale)"));
        }
        if self.n == 0 {
            return Err(CliError::usage("n must be positive"));
        }
        if self.kinds.is_empty() {
            return Err(CliError::usage("at least one bound kind is required"));
        }
        Ok(())
    }

    pub fn grid(&self, clamp: bool) -> SurfaceGrid {
        let (alo, ahi, asteps) = self.alpha_range;
        let (blo, bhi, bsteps, scale) = self.beta_over_n_range;
        SurfaceGrid {
            alphas: linspace(alo, ahi, asteps),
            beta_over_n: match scale {
                Scale::Linear => linspace(blo, bhi, bsteps),
                Scale::Log => logspace(blo, bhi, bsteps),
            },
            n: self.n,
            clamp,
        }
    }
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> CliResult {
    let sweep = SweepSpec {
        alpha_range: (a.alpha_min, a.alpha_max, a.alpha_steps),
        beta_over_n_range: (a.beta_min, a.beta_max, a.beta_steps, a.beta_scale),
        n: a.n,
        kinds: a.kinds.clone(),
        family: a.family,
    };
    sweep.validate()?;
    let specs: Vec<BoundSpec> = a
        .kinds
        .iter()
        .map(|&k| {
            let mut s = BoundSpec::new(k, a.family);
            if !k.is_average() {
                s.delta = a.delta;
            }
            s.sigma2 = a.sigma2;
            s.ln_upsilon = a.ln_upsilon;
            s.u = a.u;
            s.validate().map(|_| s)
        })
        .collect::<crate::Result<_>>()?;
    let grid = sweep.grid(a.clamp);
    let (columns, diff) = if specs.len() >= 2 {
        let surf = comparison_surface(&specs[0], &specs[1], &grid);
        let mut cols = vec![surf.a, surf.b];
        cols.extend(evaluate_grid(&specs[2..], &grid));
        (cols, Some(surf.diff))
    } else {
        (evaluate_grid(&specs, &grid), None)
    };
    let mut header = vec!["alpha".to_string(), "beta_over_n".to_string()];
    header.extend(a.kinds.iter().map(|k| k.name().to_string()));
    if diff.is_some() {
        header.push("diff".into());
    }
    writeln!(out, "{}", header.join(","))?;
    let mut cell = 0;
    for &alpha in &grid.alphas {
        for &bn in &grid.beta_over_n {
            let mut row = vec![fmt_num(alpha), fmt_num(bn)];
            row.extend(columns.iter().map(|c| fmt_num(c[cell])));
            if let Some(d) = &diff {
                row.push(fmt_num(d[cell]));
            }
            writeln!(out, "{}", row.join(","))?;
            cell += 1;
        }
    }
    Ok(())
}

fn cmd_ndep(a: &NdepArgs, out: &mut dyn Write) -> CliResult {
    let mut spec = BoundSpec::new(a.kind, a.family);
    spec.delta = a.delta;
    spec.sigma2 = a.sigma2;
    let ns = ndep_sizes(a.nmin, a.nmax, a.points)?;
    let rows = n_dependence(&spec, a.alpha, a.beta, &ns)?;
    writeln!(out, "n,bound")?;
    for (n, b) in rows {
        writeln!(out, "{n},{}", fmt_num(b))?;
    }
    Ok(())
}

fn comparator_param(arg: Option<&str>, key: &str, spec: &str) -> CliResult<f64> {
    let (k, v) = arg
        .and_then(|a| a.split_once('='))
        .ok_or_else(|| CliError::usage(format!("comparator `{spec}` needs {key}=<value>")))?;
    if k.trim() != key {
        return Err(CliError::usage(format!("comparator `{spec}` needs {key}=<value>")));
    }
    v.trim()
        .parse()
        .map_err(|e| CliError::usage(format!("bad value in `{spec}`: {e}")))
}

/// Parses a comparator name; family-dependent comparators use `family`.
pub fn parse_comparator(spec: &str, family: Family) -> CliResult<Comparator> {
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => (n.trim(), Some(a.trim())),
        None => (spec.trim(), None),
    };
    Ok(match name {
        "kl" => Comparator::BinaryKl,
        "cramer" => Comparator::Cramer(family),
        "catoni" => Comparator::Catoni {
            gamma: comparator_param(arg, "gamma", spec)?,
        },
        "scaled_diff" => Comparator::ScaledDiff {
            t: comparator_param(arg, "t", spec)?,
        },
        "poisson_diff" => Comparator::PoissonDiff {
            t: comparator_param(arg, "t", spec)?,
        },
        "laplace_diff" => match family {
            Family::Laplace { scale } => Comparator::LaplaceDiff {
                t: comparator_param(arg, "t", spec)?,
                b: scale,
            },
            _ => return Err(CliError::usage("laplace_diff needs a laplace family")),
        },
        "parametric" => Comparator::Parametric {
            family,
            t: comparator_param(arg, "t", spec)?,
        },
        _ => return Err(CliError::usage(format!("unknown comparator `{spec}`"))),
    })
}

fn cmd_upsilon(a: &UpsilonArgs, seed: u64, out: &mut dyn Write) -> CliResult {
    let comp = parse_comparator(&a.comparator, a.family)?;
    let method = match a.method {
        UpsilonMethod::Auto => match a.family {
            Family::Bernoulli => UpsilonMethod::Exact,
            Family::Poisson | Family::NegativeBinomial { .. } => UpsilonMethod::Series,
            Family::Gaussian { .. } | Family::Gamma { .. } | Family::InverseGaussian { .. } => {
                UpsilonMethod::Quadrature
            }
            Family::Laplace { .. } => UpsilonMethod::Mc,
        },
        m => m,
    };
    let grid = RGrid::default_for(a.family);
    let est = match method {
        UpsilonMethod::Exact => {
            if a.family != Family::Bernoulli {
                return Err(CliError::usage("exact Υ is available for the bernoulli family only"));
            }
            upsilon_bernoulli_exact(&comp, a.n, a.r_points.unwrap_or(2001))?
        }
        UpsilonMethod::Series => {
            if !a.family.is_lattice() {
                return Err(CliError::usage("series Υ needs a lattice family (poisson, negbin)"));
            }
            upsilon_series(&comp, a.family, a.n, a.eps, grid.with_points(a.r_points.unwrap_or(2001)))?
        }
        UpsilonMethod::Quadrature => {
            upsilon_quadrature(&comp, a.family, a.n, a.eps, grid.with_points(a.r_points.unwrap_or(41)))?
        }
        UpsilonMethod::Mc => {
            let rs = grid.with_points(a.r_points.unwrap_or(41)).values();
            upsilon_monte_carlo(&comp, a.family, a.n, &rs, a.samples, seed)?
        }
        UpsilonMethod::Auto => unreachable!(),
    };
    writeln!(out, "{}", serde_json::to_string(&est).map_err(|e| CliError::usage(e.to_string()))?)?;
    Ok(())
}

fn json(v: &impl serde::Serialize) -> CliResult<String> {
    serde_json::to_string(v).map_err(|e| CliError::usage(e.to_string()))
}

fn cmd_verify(a: &VerifyArgs, seed: u64, out: &mut dyn Write) -> CliResult {
    match a.mode {
        VerifyMode::Trials => {
            let problem = SyntheticProblem::random(a.family, a.m, a.n, a.c, a.trials, seed)?;
            let specs = match a.bound {
                Some(k) if k.is_average() => vec![BoundSpec::new(k, a.family)],
                Some(k) => vec![BoundSpec::new(k, a.family).with_delta(a.delta)],
                None => certified_kinds(a.family, a.delta),
            };
            let mut failed = Vec::new();
            for (records, summary) in run_trials_multi(&problem, &specs)? {
                for r in &records {
                    writeln!(out, "{}", json(r)?)?;
                }
                writeln!(out, "{}", json(&serde_json::json!({ "summary": summary }))?)?;
                eprintln!(
                    "{}: violations={}/{} rate={} ci=[{}, {}] delta={} {}",
                    summary.kind,
                    summary.violations,
                    summary.trials,
                    fmt_num(summary.rate),
                    fmt_num(summary.ci.0),
                    fmt_num(summary.ci.1),
                    summary.delta.map_or("none".into(), fmt_num),
                    if summary.passed { "PASS" } else { "FAIL" }
                );
                if !summary.passed {
                    failed.push(summary.kind.to_string());
                }
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::failed(format!("violation rate above delta for {}", failed.join(", "))))
            }
        }
        VerifyMode::Suite => {
            let cfg = SuiteConfig {
                trials: a.trials,
                delta: a.delta,
                ..SuiteConfig::default()
            };
            let summaries = run_suite(&cfg)?;
            let mut failed = 0;
            for s in &summaries {
                writeln!(out, "{}", json(s)?)?;
                if !s.passed {
                    failed += 1;
                }
            }
            eprintln!("suite: {} summaries, {failed} failed", summaries.len());
            if failed == 0 {
                Ok(())
            } else {
                Err(CliError::failed(format!("{failed} suite entries exceed delta")))
            }
        }
        VerifyMode::Average => {
            let problem = SyntheticProblem::random(a.family, a.m, a.n, a.c, a.trials, seed)?;
            let chk = average_check(&problem)?;
            writeln!(out, "{}", json(&chk)?)?;
            if chk.passed {
                Ok(())
            } else {
                Err(CliError::failed("average bound violated beyond two standard errors"))
            }
        }
        VerifyMode::Samplewise => {
            let problem = SyntheticProblem::random(a.family, a.m, a.n, a.c, 1, seed)?;
            let cmp = run_samplewise_comparison(&problem, a.outer, a.inner)?;
            if let Some(w) = &cmp.warning {
                eprintln!("warning: {w}");
            }
            writeln!(out, "{}", json(&cmp)?)?;
            if cmp.dominates() {
                Ok(())
            } else {
                Err(CliError::failed("samplewise bound exceeds the full-sample bound"))
            }
        }
    }
}

fn report_checks(checks: &[IdentityCheck], out: &mut dyn Write) -> CliResult {
    let mut failed = 0;
    for c in checks {
        writeln!(
            out,
            "{}: cells={} max_error={} tolerance={} {}",
            c.name,
            c.cells,
            fmt_num(c.max_error),
            fmt_num(c.tolerance),
            if c.passed { "PASS" } else { "FAIL" }
        )?;
        if !c.passed {
            failed += 1;
        }
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::failed(format!("{failed} identity suite(s) failed")))
    }
}

fn cmd_conjugate(a: &ConjugateArgs, out: &mut dyn Write) -> CliResult {
    if let (Some(q), Some(p)) = (a.q, a.p) {
        let family = a.family.ok_or_else(|| CliError::usage("--q/--p need --family"))?;
        let sided = match a.sided {
            Side::Full => Sidedness::Full,
            Side::Nonneg => Sidedness::NonnegOnly,
        };
        let v = numeric_conjugate(&CgfHandle::of_family(family, p, sided)?, q, CONJUGATE_TOL)?;
        let closed = match family.cramer(q, p) {
            Ok(c) => fmt_num(c),
            Err(_) => "nan".into(),
        };
        writeln!(
            out,
            "value={} closed_form={} t_star={} at_boundary={}",
            fmt_num(v.value),
            closed,
            fmt_num(v.t_star),
            v.at_boundary
        )?;
        return Ok(());
    }
    let families: Vec<Family> = match a.family {
        Some(f) => vec![f],
        None => Family::all_kinds().to_vec(),
    };
    let checks: Vec<IdentityCheck> = families.into_iter().map(|f| conjugate_check(f, a.points)).collect();
    report_checks(&checks, out)
}
