//! Argument parsing and dispatch for the `meanswitch` binary.

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use meanswitch_core::affinity::{build_phi_surface, detect_affine, normalize_pair, AFFINITY_GRID, PHI_SURFACE_GRID};
use meanswitch_core::means::discrete_mean;
use meanswitch_core::search::{maximize_residual, Constraint, SearchConfig};
use meanswitch_core::switch::{continuous_residual, discrete_residual, reduce_to_discrete};
use meanswitch_core::verify::{run_all, run_suite, SuiteSizes};
use meanswitch_core::{ContinuousSwitchInstance, SimpleMeasure, SwitchInstance};
use serde_json::Value;

use crate::error::{CliError, CliResult};
use crate::formats::{
    matrix_to_csv, parse_generator, parse_interval, parse_kernel, parse_list, parse_matrix, parse_measure,
    parse_weights, read_source,
};
use crate::{canonical, report};

#[derive(Debug, Parser)]
#[command(name = "meanswitch", version, about = "Quasi-arithmetic means and the switch equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weighted quasi-arithmetic mean of a list of values.
    EvalMean(EvalMeanArgs),
    /// Both sides of the switch equation for a value matrix.
    Residual(ResidualArgs),
    /// Both sides of the switch equation for a kernel on [0,1]².
    ResidualCont(ContinuousArgs),
    /// Reduce a step-kernel instance to a 2×2 matrix instance.
    Reduce(ContinuousArgs),
    /// Fit f = a·g + b and report the worst deviation.
    Affinity(AffinityArgs),
    /// Tabulate Φ for a normalized pair and fit a plane.
    Phi(PhiArgs),
    /// Search for matrices that make the residual large.
    Search(SearchArgs),
    /// Run verification suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct Pair {
    /// Generator f, e.g. `pow:2` or `exp:1|affine:3:-1`.
    #[arg(long)]
    pub f: String,
    /// Generator g.
    #[arg(long)]
    pub g: String,
    /// Working interval `lo,hi`.
    #[arg(long, allow_hyphen_values = true)]
    pub interval: String,
}

#[derive(Debug, Args)]
pub struct EvalMeanArgs {
    #[arg(long)]
    pub generator: String,
    #[arg(long, allow_hyphen_values = true)]
    pub interval: String,
    #[arg(long)]
    pub weights: String,
    #[arg(long, allow_hyphen_values = true)]
    pub values: String,
}

#[derive(Debug, Args)]
pub struct ResidualArgs {
    #[command(flatten)]
    pub pair: Pair,
    /// Row weights.
    #[arg(long)]
    pub lambda: String,
    /// Column weights.
    #[arg(long)]
    pub mu: String,
    /// CSV or JSON matrix file; `-` reads standard input.
    #[arg(long)]
    pub matrix: String,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args)]
pub struct ContinuousArgs {
    #[command(flatten)]
    pub pair: Pair,
    /// Measure as JSON (inline or a file path); Lebesgue if omitted.
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long)]
    pub mu: Option<String>,
    /// `bilinear:c00,c10,c01,c11` or `step:a,b,c,d,s,t`.
    #[arg(long, allow_hyphen_values = true)]
    pub kernel: String,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args)]
pub struct AffinityArgs {
    #[command(flatten)]
    pub pair: Pair,
    #[arg(long, default_value_t = AFFINITY_GRID)]
    pub grid: usize,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args)]
pub struct PhiArgs {
    #[command(flatten)]
    pub pair: Pair,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = PHI_SURFACE_GRID)]
    pub grid: usize,
    /// Point sent to 0 by the normalization; defaults to the interval's lower end.
    #[arg(long, allow_hyphen_values = true)]
    pub xi0: Option<f64>,
    /// Point sent to 1; defaults to the interval's upper end.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<f64>,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConstraintArg {
    None,
    Symmetric,
    #[value(alias = "rank_one")]
    Rank1,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub pair: Pair,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = SearchConfig::default().max_evals)]
    pub max_evals: usize,
    #[arg(long, value_enum, default_value_t = ConstraintArg::None)]
    pub constraint: ConstraintArg,
    #[arg(long)]
    pub optimize_weights: bool,
    #[arg(long, default_value_t = SearchConfig::default().weight_floor)]
    pub weight_floor: f64,
    /// Fixed row weights (uniform if omitted; ignored with --optimize-weights).
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long)]
    pub mu: Option<String>,
    #[arg(long)]
    pub out: Option<String>,
    /// Also write the best matrix as CSV.
    #[arg(long)]
    pub matrix_out: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite name, or `all`.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<String>,
}

/// What a successful command produced.
pub struct Outcome {
    pub text: String,
    pub out: Option<String>,
    /// False when a verification ran but did not pass.
    pub pass: bool,
}

impl Outcome {
    fn json(value: &Value, out: &Option<String>) -> Self {
        Self { text: canonical::to_string(value), out: out.clone(), pass: true }
    }
}

fn finite(x: f64, what: &'static str) -> CliResult<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(meanswitch_core::Error::NonFinite(what).into())
    }
}

fn measure(arg: &Option<String>) -> CliResult<SimpleMeasure> {
    arg.as_deref().map_or(Ok(SimpleMeasure::lebesgue()), parse_measure)
}

fn continuous_instance(args: &ContinuousArgs) -> CliResult<ContinuousSwitchInstance> {
    Ok(ContinuousSwitchInstance::new(
        parse_generator(&args.pair.f)?,
        parse_generator(&args.pair.g)?,
        parse_interval(&args.pair.interval)?,
        measure(&args.lambda)?,
        measure(&args.mu)?,
        parse_kernel(&args.kernel)?,
    )?)
}

pub fn execute(command: &Command) -> CliResult<Outcome> {
    match command {
        Command::EvalMean(a) => {
            let w = parse_generator(&a.generator)?;
            let mean = discrete_mean(&w, &parse_interval(&a.interval)?, &parse_weights(&a.weights)?, &parse_list(&a.values)?)?;
            Ok(Outcome { text: format!("{}\n", mean.value), out: None, pass: true })
        }
        Command::Residual(a) => {
            let inst = SwitchInstance::new(
                parse_generator(&a.pair.f)?,
                parse_generator(&a.pair.g)?,
                parse_interval(&a.pair.interval)?,
                parse_weights(&a.lambda)?,
                parse_weights(&a.mu)?,
                parse_matrix(&read_source(&a.matrix)?)?,
            )?;
            Ok(Outcome::json(&report::residual(&discrete_residual(&inst)?), &a.out))
        }
        Command::ResidualCont(a) => {
            let r = continuous_residual(&continuous_instance(a)?)?;
            Ok(Outcome::json(&report::residual(&r), &a.out))
        }
        Command::Reduce(a) => {
            let inst = continuous_instance(a)?;
            let red = reduce_to_discrete(&inst)?;
            Ok(Outcome::json(&report::reduction(&red, &continuous_residual(&inst)?)?, &a.out))
        }
        Command::Affinity(a) => {
            let fit = detect_affine(
                &parse_generator(&a.pair.f)?,
                &parse_generator(&a.pair.g)?,
                &parse_interval(&a.pair.interval)?,
                a.grid,
            )?;
            Ok(Outcome::json(&report::affinity(&fit), &a.out))
        }
        Command::Phi(a) => {
            let i = parse_interval(&a.pair.interval)?;
            let xi0 = finite(a.xi0.unwrap_or(i.lo()), "xi0")?;
            let x0 = finite(a.x0.unwrap_or(i.hi()), "x0")?;
            let phi = normalize_pair(&parse_generator(&a.pair.f)?, &parse_generator(&a.pair.g)?, &i, xi0, x0)?;
            let surface = build_phi_surface(&phi, finite(a.alpha, "alpha")?, a.grid)?;
            Ok(Outcome::json(&report::phi(&surface), &a.out))
        }
        Command::Search(a) => search(a),
        Command::Verify(a) => {
            let sizes = SuiteSizes::default();
            let (value, pass) = if a.suite == "all" {
                let reports = run_all(a.seed, &sizes)?;
                (report::suites(a.seed, &reports), reports.iter().all(|r| r.pass))
            } else {
                let r = run_suite(&a.suite, a.seed, &sizes)?;
                (report::suite(&r), r.pass)
            };
            Ok(Outcome { pass, ..Outcome::json(&value, &a.out) })
        }
    }
}

fn search(a: &SearchArgs) -> CliResult<Outcome> {
    let cfg = SearchConfig {
        m: a.m,
        n: a.n,
        restarts: a.restarts,
        seed: a.seed,
        max_evals: a.max_evals,
        constraint: match a.constraint {
            ConstraintArg::None => Constraint::None,
            ConstraintArg::Symmetric => Constraint::Symmetric,
            ConstraintArg::Rank1 => Constraint::RankOne,
        },
        optimize_weights: a.optimize_weights,
        weight_floor: finite(a.weight_floor, "weight_floor")?,
        lambda: a.lambda.as_deref().map(parse_weights).transpose()?,
        mu: a.mu.as_deref().map(parse_weights).transpose()?,
    };
    let result = maximize_residual(
        &parse_generator(&a.pair.f)?,
        &parse_generator(&a.pair.g)?,
        &parse_interval(&a.pair.interval)?,
        &cfg,
    )?;
    if let Some(path) = &a.matrix_out {
        write_file(path, &matrix_to_csv(&result.best_instance.matrix))?;
    }
    Ok(Outcome::json(&report::search(&result, &cfg)?, &a.out))
}

fn write_file(path: &str, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_string(), source })
}

/// Parses `args`, runs the command and returns the process exit code:
/// 0 on success, 1 when a verification fails, 2/3/4 for parse, validation
/// and numerical errors (reported as a JSON object on `stderr`).
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(stdout, "{}", e.render());
            return 0;
        }
        Err(e) => return fail(&CliError::Usage(e.render().to_string().trim_end().to_string()), stderr),
    };
    let outcome = match execute(&cli.command) {
        Ok(o) => o,
        Err(e) => return fail(&e, stderr),
    };
    let written = match &outcome.out {
        Some(path) => write_file(path, &outcome.text),
        None => stdout.write_all(outcome.text.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    };
    if let Err(e) = written {
        return fail(&e, stderr);
    }
    if outcome.pass {
        0
    } else {
        1
    }
}

fn fail(e: &CliError, stderr: &mut dyn Write) -> i32 {
    let _ = stderr.write_all(canonical::to_string(&e.to_json()).as_bytes());
    e.exit_code()
}

pub fn main_with_env() -> i32 {
    run(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
