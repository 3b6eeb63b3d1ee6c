//! Command-line front end: `solve`, `study`, and `verify`.
//!
//! Flags may also be given in a flat JSON config file (`--config run.json`);
//! explicit flags win over file values. Step-size values accept a `pi` suffix
//! (`0.05pi`) since one catalog problem lives on (0,π)². Output files are
//! written atomically; numeric output uses shortest round-trip formatting, so
//! identical invocations produce byte-identical reports (a solve summary keeps
//! its wall time inside a separate `metadata` object, which comparisons should
//! ignore).
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error. The output
//! directory defaults to `.`, overridable by `RSFADE_OUT_DIR` or `--out-dir`.

use crate::analysis::{error_norms, refinement_study, write_atomic, StudyAxis};
use crate::error::Error;
use crate::problems::{self, ProblemSpec};
use crate::solver::{snap_time_step, solve_with_options, SolveOptions};
use crate::verify::{default_suite, targeted_suite};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const OUT_DIR_ENV: &str = "RSFADE_OUT_DIR";

/// Fourth-order ADI solver for the 2D Riesz space-fractional
/// advection-dispersion equation.
#[derive(Debug, Parser)]
#[command(name = "rsfade", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Solve a problem once and write the final field plus a summary.
    Solve(SolveArgs),
    /// Run a refinement study over halved step sizes and write a report.
    Study(StudyArgs),
    /// Run the built-in property suite and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Debug, Default, Args)]
pub struct SolveArgs {
    /// Catalog name (example1, example2) or path to a problem JSON file.
    #[arg(long)]
    pub problem: Option<String>,
    /// Grid spacing for both directions (accepts a `pi` suffix).
    #[arg(long, value_parser = parse_pi_literal, allow_hyphen_values = true)]
    pub h: Option<f64>,
    /// Cell count in x (alternative to --h).
    #[arg(long)]
    pub m1: Option<usize>,
    /// Cell count in y (defaults to --m1).
    #[arg(long)]
    pub m2: Option<usize>,
    /// Time step; snapped to divide the horizon exactly.
    #[arg(long, value_parser = parse_pi_literal, allow_hyphen_values = true)]
    pub dt: Option<f64>,
    /// Override the problem's time horizon.
    #[arg(long = "t-end", value_parser = parse_pi_literal, allow_hyphen_values = true)]
    pub t_end: Option<f64>,
    /// Output directory (default `.`, or RSFADE_OUT_DIR).
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Flat JSON file with default values for these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Also write a per-step `step,t,max_abs` checkpoint CSV.
    #[arg(long, short)]
    pub verbose: bool,
}

#[derive(Debug, Default, Args)]
pub struct StudyArgs {
    #[arg(long)]
    pub problem: Option<String>,
    /// Refinement axis: space or time.
    #[arg(long)]
    pub axis: Option<String>,
    /// Comma list of strictly decreasing step sizes, e.g. `0.1pi,0.05pi`.
    #[arg(long)]
    pub levels: Option<String>,
    /// Fixed time step for space studies.
    #[arg(long, value_parser = parse_pi_literal, allow_hyphen_values = true)]
    pub dt: Option<f64>,
    /// Fixed grid spacing for time studies (default 0.02 x domain length).
    #[arg(long, value_parser = parse_pi_literal, allow_hyphen_values = true)]
    pub h: Option<f64>,
    #[arg(long = "t-end", value_parser = parse_pi_literal, allow_hyphen_values = true)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, short)]
    pub verbose: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Run the targeted checks for this order instead of the full suite.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Matrix size for the targeted checks.
    #[arg(long)]
    pub n: Option<usize>,
}

/// Errors split by exit code: usage problems exit 2, runtime failures exit 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Runtime(e) => write!(f, "error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Runtime(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parse `0.05`, `0.05pi`, or `pi` into an f64.
pub fn parse_pi_literal(text: &str) -> std::result::Result<f64, String> {
    let t = text.trim();
    let lower = t.to_ascii_lowercase();
    let (numeric, factor) = if let Some(stripped) = lower.strip_suffix("pi") {
        (stripped.trim_end(), std::f64::consts::PI)
    } else {
        (lower.as_str(), 1.0)
    };
    if numeric.is_empty() {
        return Ok(factor);
    }
    numeric
        .parse::<f64>()
        .map(|v| v * factor)
        .map_err(|_| format!("cannot parse {text:?} as a number (pi suffix allowed)"))
}

fn parse_levels(text: &str) -> CliResult<Vec<f64>> {
    let levels: Vec<f64> = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_pi_literal(s).map_err(usage))
        .collect::<CliResult<_>>()?;
    if levels.is_empty() {
        return Err(usage("no refinement levels given"));
    }
    if levels.windows(2).any(|w| w[1] >= w[0]) {
        return Err(usage("refinement levels must be strictly decreasing"));
    }
    Ok(levels)
}

/// Flat key-value file mirroring the CLI flags. Unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    problem: Option<String>,
    h: Option<PiValue>,
    m1: Option<usize>,
    m2: Option<usize>,
    dt: Option<PiValue>,
    t_end: Option<PiValue>,
    axis: Option<String>,
    levels: Option<String>,
    out_dir: Option<PathBuf>,
}

/// A number or a `pi`-suffixed string.
#[derive(Debug, Clone, Copy)]
struct PiValue(f64);

impl<'de> Deserialize<'de> for PiValue {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(de)? {
            Raw::Num(v) => Ok(PiValue(v)),
            Raw::Text(s) => parse_pi_literal(&s)
                .map(PiValue)
                .map_err(serde::de::Error::custom),
        }
    }
}

fn load_file_config(path: &Path) -> CliResult<FileConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Fully resolved run configuration.
#[derive(Debug)]
pub struct RunConfig {
    pub command: ResolvedCommand,
    pub out_dir: PathBuf,
    pub verbose: bool,
}

#[derive(Debug)]
pub enum ResolvedCommand {
    Solve {
        problem: String,
        grid: GridChoice,
        dt: f64,
        t_end: Option<f64>,
    },
    Study {
        problem: String,
        axis: StudyAxis,
        levels: Vec<f64>,
        fixed_step: Option<f64>,
        t_end: Option<f64>,
    },
    Verify {
        gamma: Option<f64>,
        n: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridChoice {
    Spacing(f64),
    Cells(usize, usize),
}

fn out_dir_from(flag: Option<PathBuf>, file: Option<PathBuf>) -> PathBuf {
    flag.or(file)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Parse an argv vector into a resolved configuration. CLI flags override
/// config-file values; contradictions and missing requirements are usage
/// errors (exit code 2).
pub fn parse_config<I, T>(argv: I) -> CliResult<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| usage(e.to_string()))?;
    resolve(cli)
}

/// Merge flags with the optional config file and validate.
pub fn resolve(cli: Cli) -> CliResult<RunConfig> {
    match cli.command {
        CliCommand::Solve(args) => {
            let file = match &args.config {
                Some(path) => load_file_config(path)?,
                None => FileConfig::default(),
            };
            let problem = args
                .problem
                .or(file.problem)
                .ok_or_else(|| usage("solve needs --problem"))?;
            let h = args.h.or(file.h.map(|v| v.0));
            let m1 = args.m1.or(file.m1);
            let m2 = args.m2.or(file.m2);
            let grid = match (h, m1) {
                (Some(_), Some(_)) => {
                    return Err(usage("--h conflicts with --m1/--m2; give one grid choice"))
                }
                (Some(h), None) => {
                    if m2.is_some() {
                        return Err(usage("--m2 needs --m1"));
                    }
                    GridChoice::Spacing(h)
                }
                (None, Some(m1)) => GridChoice::Cells(m1, m2.unwrap_or(m1)),
                (None, None) => return Err(usage("solve needs --h or --m1")),
            };
            let dt = args
                .dt
                .or(file.dt.map(|v| v.0))
                .ok_or_else(|| usage("solve needs --dt"))?;
            Ok(RunConfig {
                command: ResolvedCommand::Solve {
                    problem,
                    grid,
                    dt,
                    t_end: args.t_end.or(file.t_end.map(|v| v.0)),
                },
                out_dir: out_dir_from(args.out_dir, file.out_dir),
                verbose: args.verbose,
            })
        }
        CliCommand::Study(args) => {
            let file = match &args.config {
                Some(path) => load_file_config(path)?,
                None => FileConfig::default(),
            };
            let problem = args
                .problem
                .or(file.problem)
                .ok_or_else(|| usage("study needs --problem"))?;
            let axis = match args
                .axis
                .or(file.axis)
                .ok_or_else(|| usage("study needs --axis space|time"))?
                .as_str()
            {
                "space" => StudyAxis::Space,
                "time" => StudyAxis::Time,
                other => return Err(usage(format!("unknown axis {other:?}"))),
            };
            let levels = parse_levels(
                &args
                    .levels
                    .or(file.levels)
                    .ok_or_else(|| usage("study needs --levels"))?,
            )?;
            let fixed_step = match axis {
                StudyAxis::Space => Some(
                    args.dt
                        .or(file.dt.map(|v| v.0))
                        .ok_or_else(|| usage("space studies need a fixed --dt"))?,
                ),
                // Time studies default to h = 0.02 x length, resolved later.
                StudyAxis::Time => args.h.or(file.h.map(|v| v.0)),
            };
            Ok(RunConfig {
                command: ResolvedCommand::Study {
                    problem,
                    axis,
                    levels,
                    fixed_step,
                    t_end: args.t_end.or(file.t_end.map(|v| v.0)),
                },
                out_dir: out_dir_from(args.out_dir, file.out_dir),
                verbose: args.verbose,
            })
        }
        CliCommand::Verify(args) => Ok(RunConfig {
            command: ResolvedCommand::Verify {
                gamma: args.gamma,
                n: args.n,
            },
            out_dir: out_dir_from(None, None),
            verbose: false,
        }),
    }
}

fn load_problem(name: &str, t_end: Option<f64>) -> CliResult<ProblemSpec> {
    let mut problem = if name.ends_with(".json") || Path::new(name).is_file() {
        problems::from_config_file(Path::new(name))?
    } else {
        problems::by_name(name)?
    };
    if let Some(t) = t_end {
        if !(t > 0.0 && t.is_finite()) {
            return Err(usage(format!("t_end must be positive, got {t}")));
        }
        problem.t_end = t;
    }
    Ok(problem)
}

/// Dispatch a resolved configuration.
pub fn run(config: &RunConfig) -> CliResult<()> {
    match &config.command {
        ResolvedCommand::Solve {
            problem,
            grid,
            dt,
            t_end,
        } => run_solve(config, problem, *grid, *dt, *t_end),
        ResolvedCommand::Study {
            problem,
            axis,
            levels,
            fixed_step,
            t_end,
        } => run_study(config, problem, *axis, levels, *fixed_step, *t_end),
        ResolvedCommand::Verify { gamma, n } => run_verify(*gamma, *n),
    }
}

fn run_solve(
    config: &RunConfig,
    problem_name: &str,
    grid_choice: GridChoice,
    dt_requested: f64,
    t_end: Option<f64>,
) -> CliResult<()> {
    let problem = load_problem(problem_name, t_end)?;
    let grid = match grid_choice {
        GridChoice::Spacing(h) => problem.grid_with_h(h)?,
        GridChoice::Cells(m1, m2) => problem.grid_with_cells(m1, m2)?,
    };
    let (steps, dt) = snap_time_step(problem.t_end, dt_requested)?;
    if dt != dt_requested {
        eprintln!(
            "note: dt adjusted from {dt_requested} to {dt} so {steps} steps land on t_end = {}",
            problem.t_end
        );
    }
    std::fs::create_dir_all(&config.out_dir).map_err(Error::from)?;
    let checkpoint = config
        .verbose
        .then(|| config.out_dir.join(format!("{}_checkpoint.csv", problem.name())));
    let options = SolveOptions {
        checkpoint: checkpoint.clone(),
    };

    let started = Instant::now();
    let field = solve_with_options(&problem, &grid, dt, problem.t_end, &options)?;
    let wall_time = started.elapsed().as_secs_f64();

    let errors = match problem.exact_fn() {
        Some(exact) => Some(error_norms(&field, |x, y, t| exact(x, y, t), &grid)?),
        None => None,
    };

    // Final-field CSV over interior nodes.
    let mut csv = String::from(if errors.is_some() {
        "x,y,u,exact,abs_error\n"
    } else {
        "x,y,u\n"
    });
    for i in 0..grid.nx() {
        let x = grid.interior_x(i);
        for j in 0..grid.ny() {
            let y = grid.interior_y(j);
            let u = field.values()[(i, j)];
            match problem.exact(x, y, field.t()) {
                Some(e) => {
                    let _ = writeln!(csv, "{x},{y},{u},{e},{}", (u - e).abs());
                }
                None => {
                    let _ = writeln!(csv, "{x},{y},{u}");
                }
            }
        }
    }
    let csv_path = config.out_dir.join(format!("{}_solution.csv", problem.name()));
    write_atomic(&csv_path, &csv)?;

    let summary = serde_json::json!({
        "problem": problem.name(),
        "grid": {"m1": grid.m1, "m2": grid.m2, "dx": grid.dx(), "dy": grid.dy()},
        "dt_requested": dt_requested,
        "dt": dt,
        "time_steps": steps,
        "t_end": problem.t_end,
        "max_abs": field.max_abs(),
        "max_error": errors.map(|e| e.0),
        "l2_error": errors.map(|e| e.1),
        "outputs": {
            "solution_csv": csv_path.file_name().and_then(|s| s.to_str()),
            "checkpoint_csv": checkpoint.as_ref().and_then(|p| p.file_name()).and_then(|s| s.to_str()),
        },
        "metadata": {"wall_time_s": wall_time},
    });
    let json_path = config.out_dir.join(format!("{}_summary.json", problem.name()));
    write_atomic(&json_path, &serde_json::to_string_pretty(&summary).unwrap())?;

    match errors {
        Some((max_e, l2_e)) => println!(
            "{}: {} steps, max|u| = {:.6e}, max error = {:.6e}, l2 error = {:.6e}",
            problem.name(),
            steps,
            field.max_abs(),
            max_e,
            l2_e
        ),
        None => println!(
            "{}: {} steps, max|u| = {:.6e}",
            problem.name(),
            steps,
            field.max_abs()
        ),
    }
    Ok(())
}

fn run_study(
    config: &RunConfig,
    problem_name: &str,
    axis: StudyAxis,
    levels: &[f64],
    fixed_step: Option<f64>,
    t_end: Option<f64>,
) -> CliResult<()> {
    let problem = load_problem(problem_name, t_end)?;
    let fixed_step = fixed_step.unwrap_or_else(|| {
        debug_assert!(axis == StudyAxis::Time);
        0.02 * problem.length_x()
    });
    let report = refinement_study(&problem, axis, levels, fixed_step)?;

    std::fs::create_dir_all(&config.out_dir).map_err(Error::from)?;
    let stem = format!("{}_{}_study", report.problem, axis.label());
    let csv_path = config.out_dir.join(format!("{stem}.csv"));
    let json_path = config.out_dir.join(format!("{stem}.json"));
    let dat_path = config.out_dir.join(format!("{stem}_loglog.dat"));
    write_atomic(&csv_path, &report.to_csv())?;
    write_atomic(&json_path, &report.to_json())?;
    write_atomic(&dat_path, &report.to_plot_data())?;

    println!(
        "{} {} study (fixed {} = {}):",
        report.problem,
        axis.label(),
        report.fixed_kind,
        report.fixed_step
    );
    println!("{:>14} {:>14} {:>14} {:>10}", "step", "max_error", "l2_error", "rate");
    for (i, level) in report.levels.iter().enumerate() {
        let rate = if i > 0 {
            format!("{:.5}", report.rates[i - 1])
        } else {
            "-".into()
        };
        println!(
            "{:>14.8} {:>14.6e} {:>14.6e} {:>10}",
            level.step, level.max_error, level.l2_error, rate
        );
    }
    println!("wrote {}, {}, {}", csv_path.display(), json_path.display(), dat_path.display());
    Ok(())
}

fn run_verify(gamma: Option<f64>, n: Option<usize>) -> CliResult<()> {
    let outcomes = match gamma {
        Some(g) => targeted_suite(g, n),
        None => default_suite(),
    };
    let mut failed = Vec::new();
    for outcome in &outcomes {
        println!(
            "{} {:<28} {}",
            if outcome.passed { "PASS" } else { "FAIL" },
            outcome.name,
            outcome.detail
        );
        if !outcome.passed {
            failed.push(outcome.name);
        }
    }
    if failed.is_empty() {
        println!("all {} checks passed", outcomes.len());
        Ok(())
    } else {
        Err(CliError::Runtime(Error::Configuration(format!(
            "verification failed: {}",
            failed.join(", ")
        ))))
    }
}
