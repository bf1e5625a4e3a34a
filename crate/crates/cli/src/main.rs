//! `crtrace`: constants, verification suites, sweeps and quotient
//! minimization from the command line.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 bad configuration,
//! 3 resolution not feasible, 4 output could not be written.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crtrace::inequalities::{InequalityError, Resolution, TheoremCase, TheoremId};
use crtrace::optimizer::{minimize_restarts, Minimization, MinimizeOptions, OptimizerError, QuotientProblem};
use crtrace::report::{
    all_constants, constant_row, constants_csv, records_csv, records_json, run_suite, suite, verify_case, ConstantRow,
    Record, ReportError, VerifyOptions,
};
use crtrace::spectral::SpectralError;

#[derive(Parser, Debug)]
#[command(name = "crtrace", version, about = "Sharp constants and numerical checks for CR and round trace inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print sharp constants.
    Constants {
        /// Theorem id (`thm14`, `sobolev-cr`, `hls`, ...).
        theorem: Option<String>,
        /// Table of every constant on a small parameter grid.
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Equality at the centered extremal and the inequality on random fields,
    /// for one case or for the `quick` / `full` suite.
    Verify {
        target: String,
        #[command(flatten)]
        common: Common,
        /// Number of random fields per case.
        #[arg(long, default_value_t = 4)]
        fields: u64,
    },
    /// `verify` at band limits 2, 4, ..., `--degree`.
    Sweep {
        theorem: String,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4)]
        fields: u64,
    },
    /// Minimize the Rayleigh quotient of a Sobolev or trace inequality.
    Optimize {
        /// `sobolev-cr`, `thm14` or `sobolev-round`.
        theorem: String,
        #[command(flatten)]
        common: Common,
        /// Independent runs with seeds `seed, seed+1, ...`.
        #[arg(long, default_value_t = 1)]
        restarts: u64,
        #[arg(long, default_value_t = 2000)]
        max_iters: usize,
    },
    /// Summarize a JSON record file written by `verify` or `sweep`.
    Report {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Grid exactness, or `default` for twice the band limit.
    #[arg(long)]
    grid: Option<String>,
    /// Band limit L.
    #[arg(long)]
    degree: Option<usize>,
    /// Minimum distance to the sub-sphere for direct kernel quadrature.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Tolerance override.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Infeasible(String),
    Write(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Infeasible(_) => 3,
            Self::Write(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Config(m) => write!(f, "configuration error: {m}"),
            Self::Infeasible(m) => write!(f, "resolution not feasible: {m}"),
            Self::Write(m) => write!(f, "write failed: {m}"),
        }
    }
}

fn from_inequality(e: InequalityError) -> Failure {
    match e {
        InequalityError::Spectral(SpectralError::Resolution { .. }) => Failure::Infeasible(e.to_string()),
        e => Failure::Config(e.to_string()),
    }
}

impl From<InequalityError> for Failure {
    fn from(e: InequalityError) -> Self {
        from_inequality(e)
    }
}

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::Infeasible(m) => Self::Infeasible(m),
            ReportError::Inequality(e) => from_inequality(e),
            e => Self::Config(e.to_string()),
        }
    }
}

impl From<OptimizerError> for Failure {
    fn from(e: OptimizerError) -> Self {
        match e {
            OptimizerError::Spectral(SpectralError::Resolution { .. }) => Self::Infeasible(e.to_string()),
            OptimizerError::Inequality(e) => from_inequality(e),
            e => Self::Config(e.to_string()),
        }
    }
}

impl Common {
    fn resolution(&self) -> Result<Resolution, Failure> {
        let mut r = Resolution::default();
        if let Some(g) = &self.grid {
            r.grid = match g.as_str() {
                "default" => 0,
                v => v.parse().map_err(|_| Failure::Config(format!("--grid expects an integer or `default`, got {v}")))?,
            };
        }
        if let Some(l) = self.degree {
            r.l = l;
        }
        if let Some(d) = self.delta {
            r.delta = d;
        }
        if r.grid != 0 && r.grid < 2 * r.l {
            return Err(Failure::Infeasible(format!("grid exactness {} is below 2L = {}", r.grid, 2 * r.l)));
        }
        Ok(r)
    }

    fn case(&self, name: &str) -> Result<TheoremCase, Failure> {
        let id = TheoremId::parse(name).ok_or_else(|| {
            let known: Vec<&str> = TheoremId::ALL.iter().map(|t| t.name()).collect();
            Failure::Config(format!("unknown theorem `{name}`; expected one of {}", known.join(", ")))
        })?;
        let n = self.n.ok_or_else(|| Failure::Config("--n is required".into()))?;
        Ok(TheoremCase::new(id, n, self.m.unwrap_or(0), self.s, self.lambda)?.with_resolution(self.resolution()?))
    }

    fn emit(&self, text: &str) -> Result<(), Failure> {
        match &self.out {
            Some(p) => std::fs::write(p, text).map_err(|e| Failure::Write(format!("{}: {e}", p.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn setup_threads(&self) -> Result<(), Failure> {
        if let Some(j) = self.jobs {
            rayon::ThreadPoolBuilder::new()
                .num_threads(j.max(1))
                .build_global()
                .map_err(|e| Failure::Config(e.to_string()))?;
        }
        Ok(())
    }
}

fn verify_options(c: &Common, fields: u64) -> VerifyOptions {
    VerifyOptions {
        tol: c.tol,
        seeds: (c.seed..c.seed + fields).collect(),
    }
}

fn summarize(records: &[Record]) -> bool {
    for r in records {
        eprintln!(
            "{} {:<44} {:<9} deficit {:>12.4e} (rel {:>10.3e}, err {:.2e})",
            if r.pass { "PASS" } else { "FAIL" },
            r.case_id,
            r.input,
            r.deficit,
            r.deficit / r.lhs.abs().max(f64::MIN_POSITIVE),
            r.error_estimate
        );
    }
    let failed = records.iter().filter(|r| !r.pass).count();
    eprintln!("{} records, {failed} failed", records.len());
    failed == 0
}

fn write_records(c: &Common, records: &[Record]) -> Result<bool, Failure> {
    let ok = summarize(records);
    let text = match c.format {
        Format::Json => records_json(records) + "\n",
        Format::Csv => records_csv(records),
    };
    c.emit(&text)?;
    Ok(ok)
}

fn constants(theorem: Option<&str>, all: bool, c: &Common) -> Result<bool, Failure> {
    let rows: Vec<ConstantRow> = match (theorem, all) {
        (_, true) => all_constants()?,
        (Some(t), false) => vec![constant_row(&c.case(t)?)?],
        (None, false) => return Err(Failure::Config("give a theorem or --all".into())),
    };
    let text = match c.format {
        Format::Csv => constants_csv(&rows),
        Format::Json => serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n",
    };
    c.emit(&text)?;
    Ok(true)
}

fn verify(target: &str, c: &Common, fields: u64) -> Result<bool, Failure> {
    let opts = verify_options(c, fields);
    let records = match target {
        "quick" | "full" => {
            let res = (c.grid.is_some() || c.degree.is_some() || c.delta.is_some()).then(|| c.resolution()).transpose()?;
            run_suite(&suite(target)?, res, &opts)?
        }
        name => verify_case(&c.case(name)?, &opts)?,
    };
    write_records(c, &records)
}

fn sweep(theorem: &str, c: &Common, fields: u64) -> Result<bool, Failure> {
    let base = c.case(theorem)?;
    let top = base.resolution.l;
    let opts = verify_options(c, fields);
    let mut records = Vec::new();
    for l in (2..=top.max(2)).step_by(2) {
        let mut r = base.resolution;
        r.l = l;
        if r.grid != 0 && r.grid < 2 * l {
            r.grid = 2 * l;
        }
        records.extend(verify_case(&base.with_resolution(r), &opts)?);
    }
    write_records(c, &records)
}

#[derive(Serialize)]
struct RunSummary {
    seed: u64,
    best: f64,
    excess: f64,
    lowest_excess: f64,
    iterations: usize,
    converged: bool,
    monotone: bool,
    restarts: usize,
    audits: Vec<(usize, f64)>,
}

#[derive(Serialize)]
struct OptimizeReport {
    case_id: String,
    #[serde(rename = "L")]
    l: usize,
    dim: usize,
    constant: f64,
    best: f64,
    excess: f64,
    pass: bool,
    runs: Vec<RunSummary>,
    history: Vec<crtrace::optimizer::HistoryEntry>,
}

fn optimize(theorem: &str, c: &Common, restarts: u64, max_iters: usize) -> Result<bool, Failure> {
    let case = c.case(theorem)?;
    let problem = QuotientProblem::new(&case, case.resolution.l)?;
    let tol = c.tol.unwrap_or(1e-9);
    let opts = MinimizeOptions {
        max_iters,
        audit_step: Some(1e-5),
        ..Default::default()
    };
    let seeds: Vec<u64> = (c.seed..c.seed + restarts.max(1)).collect();
    let runs: Vec<Minimization> = minimize_restarts(&problem, &opts, &seeds).into_iter().collect::<Result<_, _>>()?;
    let best = runs
        .iter()
        .min_by(|a, b| a.best.total_cmp(&b.best))
        .expect("at least one run");
    let summaries: Vec<RunSummary> = runs
        .iter()
        .map(|r| RunSummary {
            seed: r.seed,
            best: r.best,
            excess: r.excess(),
            lowest_excess: r.lowest_excess(),
            iterations: r.history.last().map_or(0, |h| h.iteration),
            converged: r.converged,
            monotone: r.is_monotone(),
            restarts: r.restarts,
            audits: r.audits.clone(),
        })
        .collect();
    // No iterate below the constant, monotone histories, gradient audits within 1e-4.
    let pass = summaries
        .iter()
        .all(|r| r.monotone && r.lowest_excess >= -tol && r.audits.iter().all(|a| a.1 <= 1e-4));
    for r in &summaries {
        eprintln!(
            "seed {:>3}: best/constant - 1 = {:.6e} after {} iterations{}",
            r.seed,
            r.excess,
            r.iterations,
            if r.converged { "" } else { " (not converged)" }
        );
    }
    eprintln!("{}", if pass { "PASS" } else { "FAIL" });
    let text = match c.format {
        Format::Csv => best.history_csv(),
        Format::Json => {
            let rep = OptimizeReport {
                case_id: best.case_id.clone(),
                l: best.l,
                dim: problem.dim(),
                constant: best.constant,
                best: best.best,
                excess: best.excess(),
                pass,
                runs: summaries,
                history: best.history.clone(),
            };
            serde_json::to_string_pretty(&rep).expect("report serializes") + "\n"
        }
    };
    c.emit(&text)?;
    Ok(pass)
}

fn report(input: &PathBuf, c: &Common) -> Result<bool, Failure> {
    let text = std::fs::read_to_string(input).map_err(|e| Failure::Config(format!("{}: {e}", input.display())))?;
    let records: Vec<Record> =
        serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: not a record file: {e}", input.display())))?;
    let ok = summarize(&records);
    if c.out.is_some() || c.format == Format::Csv {
        c.emit(&records_csv(&records))?;
    }
    Ok(ok)
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match &cli.command {
        Command::Constants { theorem, all, common } => constants(theorem.as_deref(), *all, common),
        Command::Verify { target, common, fields } => {
            common.setup_threads()?;
            verify(target, common, *fields)
        }
        Command::Sweep { theorem, common, fields } => {
            common.setup_threads()?;
            sweep(theorem, common, *fields)
        }
        Command::Optimize {
            theorem,
            common,
            restarts,
            max_iters,
        } => {
            common.setup_threads()?;
            optimize(theorem, common, *restarts, *max_iters)
        }
        Command::Report { input, common } => report(input, common),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("crtrace: {f}");
            ExitCode::from(f.code())
        }
    }
}
