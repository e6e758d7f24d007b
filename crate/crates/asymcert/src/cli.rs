//! Command-line entry points: `certify`, `solve`, and `analyze-cones`.
//!
//! Each subcommand reads one JSON problem file, runs the corresponding
//! analysis, and emits a [`Report`] as human text (default) or JSON
//! (`--report json`). Exit codes are a bit-exact contract:
//!
//! | code | meaning |
//! |---|---|
//! | 0 | `PROVEN_*` verdict, converged solve, or successful cone analysis |
//! | 10 | `VIOLATED` |
//! | 20 | `UNKNOWN` (certify), budget exhausted or infeasible (solve) |
//! | 30 | `DIVERGENT` solve |
//! | 1 | input error (unreadable file, malformed JSON, bad dimensions, unknown builtin, invalid flags) |
//!
//! The RNG seed resolves as: `--seed` flag, then the problem file's
//! `overrides.seed`, then the `ASYMCERT_SEED` environment variable, then 42.
//! Two runs with identical inputs, flags, and seed produce byte-identical
//! reports.

use std::fmt::Display;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::certify::{certify_with_budget, Verdict};
use crate::pathsolver::{
    regularization_path_with_tol, PathStatus, RegSchedule, SolveError, CONVERGENCE_TOL,
};
use crate::problem::ProblemFile;
use crate::report::{cone_summaries, problem_digest, Report};
use crate::retract::FalsifierBudget;
use crate::DEFAULT_SEED;

/// Exit code for `PROVEN_*` verdicts, converged solves, and successful cone
/// analyses.
pub const EXIT_PROVEN: i32 = 0;
/// Exit code for `VIOLATED` certificates.
pub const EXIT_VIOLATED: i32 = 10;
/// Exit code for `UNKNOWN` certificates and inconclusive solves.
pub const EXIT_UNKNOWN: i32 = 20;
/// Exit code for divergent solves.
pub const EXIT_DIVERGENT: i32 = 30;
/// Exit code for input errors.
pub const EXIT_INPUT_ERROR: i32 = 1;

/// Environment variable consulted for the default seed.
pub const SEED_ENV_VAR: &str = "ASYMCERT_SEED";

/// Top-level invocation.
#[derive(Debug, Parser)]
#[command(
    name = "asymcert",
    version,
    about = "Certify existence of optimal solutions to nonconvex minimization problems and solve them along a regularization path"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// The three entry points.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the sufficient existence conditions and emit a certificate.
    Certify(RunArgs),
    /// Certify, then follow the regularization path to a minimizer or a
    /// divergence direction.
    Solve(RunArgs),
    /// Report the asymptotic, growth, retractive, and constancy cones.
    AnalyzeCones(RunArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Certify(_) => "certify",
            Command::Solve(_) => "solve",
            Command::AnalyzeCones(_) => "analyze-cones",
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Certify(a) | Command::Solve(a) | Command::AnalyzeCones(a) => a,
        }
    }
}

/// Flags shared by all subcommands. Flags win over the problem file's
/// `overrides` block, which wins over built-in defaults.
#[derive(Debug, Args)]
pub struct RunArgs {
    /// Problem file (JSON).
    pub problem: PathBuf,

    /// RNG seed for sampling and multi-start descent.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Retraction-falsifier budget: transverse probe vectors per direction.
    #[arg(long)]
    pub budget: Option<u32>,

    /// Convergence tolerance for the regularization path (step closeness).
    #[arg(long)]
    pub tol: Option<f64>,

    /// Maximum number of regularization path steps.
    #[arg(long)]
    pub max_reg_steps: Option<u32>,

    /// Report format.
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub report: ReportFormat,

    /// Expand the full iterate table in text reports.
    #[arg(long)]
    pub dump_trace: bool,
}

/// Output format for reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

/// Exit code for a certification verdict.
#[must_use]
pub fn exit_code_for_verdict(verdict: Verdict) -> i32 {
    match verdict {
        Verdict::ProvenExistsCompact | Verdict::ProvenExists | Verdict::ProvenUnderAssertions => {
            EXIT_PROVEN
        }
        Verdict::Violated => EXIT_VIOLATED,
        Verdict::Unknown => EXIT_UNKNOWN,
    }
}

/// Exit code for a solve outcome.
#[must_use]
pub fn exit_code_for_status(status: &PathStatus) -> i32 {
    match status {
        PathStatus::Converged { .. } => EXIT_PROVEN,
        PathStatus::Divergent { .. } => EXIT_DIVERGENT,
        PathStatus::BudgetExhausted => EXIT_UNKNOWN,
    }
}

/// Run a parsed invocation: the report goes to `out`, diagnostics to `err`,
/// and the contract exit code is returned.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let env_seed = seed_from_env(err);
    run_with_env_seed(cli, env_seed, out, err)
}

/// [`run`] with the environment consulted by the caller — the testable core.
pub fn run_with_env_seed(
    cli: &Cli,
    env_seed: Option<u64>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let args = cli.command.args();
    let text = match std::fs::read_to_string(&args.problem) {
        Ok(text) => text,
        Err(e) => return input_error(err, format_args!("cannot read {}: {e}", args.problem.display())),
    };
    let file = match ProblemFile::from_json(&text) {
        Ok(file) => file,
        Err(e) => return input_error(err, format_args!("{}: {e}", args.problem.display())),
    };
    let problem = match file.build() {
        Ok(problem) => problem,
        Err(e) => return input_error(err, format_args!("{}: {e}", args.problem.display())),
    };

    let seed = args
        .seed
        .or(file.overrides.seed)
        .or(env_seed)
        .unwrap_or(DEFAULT_SEED);
    let budget = match args.budget.or(file.overrides.budget) {
        Some(b) => FalsifierBudget {
            max_transverse: b as usize,
            ..FalsifierBudget::default()
        },
        None => FalsifierBudget::default(),
    };
    let tol = args.tol.or(file.overrides.tol).unwrap_or(CONVERGENCE_TOL);
    let max_steps = args.max_reg_steps.or(file.overrides.max_reg_steps);

    let mut report = Report::new(cli.command.name(), seed, problem_digest(&file));
    report.cones = cone_summaries(&problem);

    let code = match &cli.command {
        Command::AnalyzeCones(_) => EXIT_PROVEN,
        Command::Certify(_) => {
            let certificate = certify_with_budget(&problem, seed, &budget);
            let code = exit_code_for_verdict(certificate.verdict);
            report.attach_certificate(certificate);
            code
        }
        Command::Solve(_) => {
            let certificate = certify_with_budget(&problem, seed, &budget);
            let mut schedule =
                RegSchedule::for_decay_power(certificate.decay.power().unwrap_or(1.0));
            report.attach_certificate(certificate);
            if let Some(steps) = max_steps {
                schedule.max_steps = steps;
            }
            match regularization_path_with_tol(&problem, &schedule, seed, tol) {
                Ok(trace) => {
                    let code = exit_code_for_status(&trace.status);
                    report.attach_trace(trace);
                    code
                }
                Err(e @ SolveError::NoFeasibleStart { .. }) => {
                    report.caveats.push(format!("solve aborted: {e}"));
                    EXIT_UNKNOWN
                }
                Err(e @ SolveError::InvalidSchedule(_)) => {
                    return input_error(err, format_args!("{e}"));
                }
            }
        }
    };

    let rendered = match args.report {
        ReportFormat::Json => report.to_json(),
        ReportFormat::Text => report.to_text(args.dump_trace),
    };
    let _ = out.write_all(rendered.as_bytes());
    code
}

/// Read and parse `ASYMCERT_SEED`; a malformed value is warned about and
/// ignored rather than silently truncated.
fn seed_from_env(err: &mut dyn Write) -> Option<u64> {
    let raw = std::env::var(SEED_ENV_VAR).ok()?;
    match raw.parse::<u64>() {
        Ok(seed) => Some(seed),
        Err(_) => {
            let _ = writeln!(err, "warning: ignoring non-integer {SEED_ENV_VAR}={raw:?}");
            None
        }
    }
}

fn input_error(err: &mut dyn Write, message: std::fmt::Arguments<'_>) -> i32 {
    let _ = writeln!(err, "error: {message}");
    EXIT_INPUT_ERROR
}

/// Convenience for tests and embedding: run `argv` and capture output.
pub fn run_captured(argv: &[&str], env_seed: Option<u64>) -> CapturedRun {
    match Cli::try_parse_from(argv) {
        Ok(cli) => {
            let mut out = Vec::new();
            let mut err = Vec::new();
            let code = run_with_env_seed(&cli, env_seed, &mut out, &mut err);
            CapturedRun {
                code,
                stdout: String::from_utf8_lossy(&out).into_owned(),
                stderr: String::from_utf8_lossy(&err).into_owned(),
            }
        }
        Err(e) => CapturedRun {
            code: EXIT_INPUT_ERROR,
            stdout: String::new(),
            stderr: e.to_string(),
        },
    }
}

/// Outcome of [`run_captured`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapturedRun {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Display for CapturedRun {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "exit {}\n{}{}", self.code, self.stdout, self.stderr)
    }
}
