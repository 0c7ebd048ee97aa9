//! Command-line front end: instance files, cost flags and the five commands.

pub mod instance_file;

use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};
use minergy::format::g12;
use minergy::oracle::{oracle_min_with, OracleOptions};
use minergy::sinr::{plan, Gain, RadioParams, SCHEDULE_CSV_HEADER};
use minergy::solver::{solve_with, Solution, SolveOptions};
use minergy::thresholds::{lambda_table, ThresholdTable, DEFAULT_ROOT_TOL};
use minergy::{CostModel, NetworkInstance, DEFAULT_ORACLE_CAP};
use rayon::prelude::*;

pub use instance_file::ParseError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_UNCERTIFIED: i32 = 2;
pub const EXIT_TOO_LARGE: i32 = 3;

/// Environment variable overriding the exhaustive-search size cap.
pub const ORACLE_CAP_ENV: &str = "MINERGY_ORACLE_CAP";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Solver(#[from] minergy::Error),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solver(minergy::Error::TooLarge { .. }) => EXIT_TOO_LARGE,
            _ => EXIT_INPUT,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(source: io::Error) -> Self {
        CliError::Io {
            path: "output".into(),
            source,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "minergy", version, about = "Minimum-energy routing on one-dimensional sensor networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal transmission graph for one cost function.
    Solve(SolveArgs),
    /// Exponent roots and, given --a and --b, the lambda thresholds.
    Thresholds(ThresholdArgs),
    /// Optimal graph over a grid of exponents or lambdas, as CSV.
    Sweep(SweepArgs),
    /// Exhaustive search over all routing trees, compared with the solver.
    Oracle(SolveArgs),
    /// Interference-free transmission schedule for the signal-power model.
    SinrSchedule(SinrArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CostArgs {
    /// Exponent of the leading term d^a.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Exponent of the second term; needs --lambda.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Weight of the second term; needs --b.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// "mono:a" or "twoterm:a,b,lambda" instead of --a/--b/--lambda.
    #[arg(long, allow_hyphen_values = true)]
    pub gain: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    /// Instance file, or "-" for standard input.
    pub instance: PathBuf,
    #[command(flatten)]
    pub cost: CostArgs,
    /// Residual tolerance for the exponent roots.
    #[arg(long, default_value_t = DEFAULT_ROOT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ThresholdArgs {
    pub instance: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_ROOT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("range").required(true).args(["a_range", "lambda_range"])))]
pub struct SweepArgs {
    pub instance: PathBuf,
    /// Exponent grid "lo:hi"; uses --b and --lambda when both are given.
    #[arg(long, allow_hyphen_values = true)]
    pub a_range: Option<String>,
    /// Lambda grid "lo:hi" for the cost d^a + lambda d^b.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_range: Option<String>,
    #[arg(long)]
    pub step: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_ROOT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SinrArgs {
    pub instance: PathBuf,
    /// Gain exponents: gamma = 1 / (d^a + lambda d^b).
    #[command(flatten)]
    pub cost: CostArgs,
    /// Minimal received power.
    #[arg(long, default_value_t = 1.0)]
    pub p0: f64,
    /// Noise power.
    #[arg(long, default_value_t = 1.0)]
    pub n0: f64,
    #[arg(long, default_value_t = 2.0)]
    pub log_base: f64,
    #[arg(long, default_value_t = DEFAULT_ROOT_TOL)]
    pub tol: f64,
}

/// Parses `mono:a` or `twoterm:a,b,lambda`.
pub fn parse_gain(spec: &str) -> Result<CostModel, CliError> {
    let bad = || CliError::Input(format!("invalid --gain {spec:?}: expected \"mono:a\" or \"twoterm:a,b,lambda\""));
    let (kind, rest) = spec.split_once(':').ok_or_else(bad)?;
    let values = rest
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<Vec<_>, _>>()?;
    let model = match (kind.trim(), values.as_slice()) {
        ("mono", [a]) => CostModel::monomial(*a)?,
        ("twoterm", [a, b, lambda]) => CostModel::two_term(*a, *b, *lambda)?,
        _ => return Err(bad()),
    };
    Ok(model)
}

impl CostArgs {
    pub fn model(&self) -> Result<CostModel, CliError> {
        if let Some(spec) = &self.gain {
            if self.a.is_some() || self.b.is_some() || self.lambda.is_some() {
                return Err(CliError::Input("--gain cannot be combined with --a, --b or --lambda".into()));
            }
            return parse_gain(spec);
        }
        let a = self
            .a
            .ok_or_else(|| CliError::Input("a cost is required: give --a or --gain".into()))?;
        cost_from(a, self.b, self.lambda)
    }
}

fn cost_from(a: f64, b: Option<f64>, lambda: Option<f64>) -> Result<CostModel, CliError> {
    Ok(match (b, lambda) {
        (None, None) => CostModel::monomial(a)?,
        (Some(b), Some(lambda)) => CostModel::two_term(a, b, lambda)?,
        _ => return Err(CliError::Input("--b and --lambda must be given together".into())),
    })
}

pub fn read_instance(path: &Path) -> Result<NetworkInstance, CliError> {
    let name = path.display().to_string();
    let text = if name == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|source| CliError::Io {
            path: "stdin".into(),
            source,
        })?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: name.clone(),
            source,
        })?
    };
    instance_file::parse(&text).map_err(|source| CliError::Parse { path: name, source })
}

/// Oracle size cap, honouring [`ORACLE_CAP_ENV`].
pub fn oracle_cap() -> Result<usize, CliError> {
    match std::env::var(ORACLE_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("{ORACLE_CAP_ENV}={v:?} is not a nonnegative integer"))),
        Err(_) => Ok(DEFAULT_ORACLE_CAP),
    }
}

fn solve_options(tol: f64) -> Result<SolveOptions, CliError> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CliError::Input(format!("--tol {tol} must be positive")));
    }
    Ok(SolveOptions {
        root_tol: tol,
        oracle_cap: oracle_cap()?,
        ..SolveOptions::default()
    })
}

/// Runs one parsed command; returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Solve(args) => cmd_solve(args, out),
        Command::Thresholds(args) => cmd_thresholds(args, out),
        Command::Sweep(args) => cmd_sweep(args, out),
        Command::Oracle(args) => cmd_oracle(args, out),
        Command::SinrSchedule(args) => cmd_sinr_schedule(args, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn write_solution(out: &mut dyn Write, sol: &Solution) -> io::Result<()> {
    writeln!(out, "graph {}", sol.graph_name())?;
    writeln!(out, "energy {}", g12(sol.energy))?;
    writeln!(out, "certified {}", sol.certified)?;
    writeln!(out, "verified {}", sol.verified)?;
    writeln!(out, "basis {}", sol.basis)?;
    writeln!(out, "regime {}", sol.regime)?;
    if sol.ties.is_empty() {
        writeln!(out, "ties none")?;
    } else {
        let names: Vec<String> = sol.ties.iter().map(|g| g.to_string()).collect();
        writeln!(out, "ties {}", names.join(" "))?;
    }
    for (i, j, q) in sol.flow.edges() {
        writeln!(out, "edge {i} {j} {}", g12(q))?;
    }
    Ok(())
}

fn certified_code(sol: &Solution) -> i32 {
    if sol.certified {
        EXIT_OK
    } else {
        EXIT_UNCERTIFIED
    }
}

pub fn cmd_solve(args: &SolveArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let model = args.cost.model()?;
    let opts = solve_options(args.tol)?;
    let inst = read_instance(&args.instance)?;
    let sol = solve_with(&inst, &model, &opts)?;
    write_solution(out, &sol)?;
    Ok(certified_code(&sol))
}

pub fn cmd_thresholds(args: &ThresholdArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if args.a.is_some() != args.b.is_some() {
        return Err(CliError::Input("--a and --b must be given together".into()));
    }
    let tol = solve_options(args.tol)?.root_tol;
    let inst = read_instance(&args.instance)?;
    let table = match (args.a, args.b) {
        (Some(a), Some(b)) => lambda_table(&inst, a, b, tol)?,
        _ => ThresholdTable::new(&inst, tol)?,
    };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["kind", "k", "value", "residual", "status"])?;
    for (idx, (&a, &r)) in table.a_roots.iter().zip(&table.root_residuals).enumerate() {
        let k = idx + 1;
        w.write_record([format!("a_{k}"), k.to_string(), g12(a), g12(r), "ok".into()])?;
    }
    for t in &table.lambdas {
        let value = t.value.map(g12).unwrap_or_default();
        let residual = if t.residual.is_nan() { String::new() } else { g12(t.residual) };
        w.write_record([
            t.kind.label(),
            t.kind.index().to_string(),
            value,
            residual,
            t.status.as_str().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(EXIT_OK)
}

fn parse_range(flag: &str, spec: &str, step: f64) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Input(format!("invalid {flag} {spec:?}: expected \"lo:hi\""));
    let (lo, hi) = spec.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(step.is_finite() && step > 0.0) {
        return Err(CliError::Input(format!("--step {step} must be positive")));
    }
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(CliError::Input(format!("{flag} {spec:?} is an empty range")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| lo + i as f64 * step).collect())
}

/// Cost model at one sweep grid point.
type CostAt = Box<dyn Fn(f64) -> Result<CostModel, CliError> + Sync>;

pub fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let opts = solve_options(args.tol)?;
    let (name, grid, build): (&str, Vec<f64>, CostAt) =
        match (&args.a_range, &args.lambda_range) {
            (Some(range), None) => {
                if args.a.is_some() {
                    return Err(CliError::Input("--a cannot be combined with --a-range".into()));
                }
                let (b, lambda) = (args.b, args.lambda);
                cost_from(1.0, b, lambda)?;
                ("a", parse_range("--a-range", range, args.step)?, Box::new(move |a| cost_from(a, b, lambda)))
            }
            (None, Some(range)) => {
                if args.lambda.is_some() {
                    return Err(CliError::Input("--lambda cannot be combined with --lambda-range".into()));
                }
                let (Some(a), Some(b)) = (args.a, args.b) else {
                    return Err(CliError::Input("--lambda-range needs --a and --b".into()));
                };
                (
                    "lambda",
                    parse_range("--lambda-range", range, args.step)?,
                    Box::new(move |lambda| Ok(CostModel::two_term(a, b, lambda)?)),
                )
            }
            _ => return Err(CliError::Input("give exactly one of --a-range and --lambda-range".into())),
        };
    let inst = read_instance(&args.instance)?;
    let rows = grid
        .par_iter()
        .map(|&v| {
            let model = build(v)?;
            let sol = solve_with(&inst, &model, &opts)?;
            Ok([g12(v), sol.graph_name(), g12(sol.energy), sol.certified.to_string()])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([name, "graph", "energy", "certified"])?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(EXIT_OK)
}

pub fn cmd_oracle(args: &SolveArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let model = args.cost.model()?;
    let opts = solve_options(args.tol)?;
    let inst = read_instance(&args.instance)?;
    let oracle = oracle_min_with(
        &inst,
        &model,
        OracleOptions {
            cap: opts.oracle_cap,
            keep_energies: false,
        },
    )?;
    let sol = solve_with(&inst, &model, &opts)?;
    writeln!(out, "oracle_energy {}", g12(oracle.min_energy))?;
    writeln!(out, "trees_examined {}", oracle.trees_examined)?;
    writeln!(out, "argmin_count {}", oracle.argmin.len())?;
    for tree in &oracle.argmin {
        writeln!(out, "argmin {tree}")?;
    }
    writeln!(out, "solver_graph {}", sol.graph_name())?;
    writeln!(out, "solver_energy {}", g12(sol.energy))?;
    writeln!(out, "solver_certified {}", sol.certified)?;
    let agrees = (sol.energy - oracle.min_energy).abs() <= 1e-9 * oracle.min_energy.abs().max(sol.energy.abs());
    writeln!(out, "verdict {}", if agrees { "agrees" } else { "disagrees" })?;
    Ok(EXIT_OK)
}

fn gain_from(model: CostModel) -> Gain {
    match model {
        CostModel::Monomial { a } => Gain::PowerLaw { a },
        CostModel::TwoTerm { a, b, lambda } => Gain::TwoTerm { a, b, lambda },
        other => unreachable!("cost flags never produce {other}"),
    }
}

pub fn cmd_sinr_schedule(args: &SinrArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let gain = gain_from(args.cost.model()?);
    let params = RadioParams::with_log_base(args.p0, args.n0, gain, args.log_base)?;
    let opts = solve_options(args.tol)?;
    let inst = read_instance(&args.instance)?;
    let result = plan(&inst, &params, &opts)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SCHEDULE_CSV_HEADER)?;
    for record in result.schedule.csv_records() {
        w.write_record(&record)?;
    }
    w.flush()?;
    drop(w);
    writeln!(err, "graph {}", result.solution.graph_name())?;
    writeln!(err, "certified {}", result.solution.certified)?;
    writeln!(err, "c0 {}", g12(params.c0()))?;
    writeln!(err, "flow_energy {}", g12(result.solution.energy))?;
    writeln!(err, "total_energy {}", g12(result.schedule.total_energy))?;
    writeln!(err, "makespan {}", g12(result.schedule.makespan()))?;
    Ok(certified_code(&result.solution))
}
