//! `vie` command-line driver.
//!
//! Exit codes: 0 success, 1 configuration or validation error, 2 numerical
//! failure, 3 expression parse error. Diagnostic warnings never change the
//! exit code.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::analysis::{self, AnalysisError, CsvSource};
use crate::config::{self, ConfigError};
use crate::problem::{Problem, DEFAULT_J_MAX};
use crate::solver::{self, SolveError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_PARSE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "vie",
    version,
    about = "First-kind Volterra equations with piecewise discontinuous kernels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// JSON problem file
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Built-in example
    #[arg(long, value_name = "1|2|3", value_parser = clap::value_parser!(u32).range(1..=3))]
    example: Option<u32>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print solvability diagnostics
    Check {
        #[command(flatten)]
        source: Source,
    },
    /// Solve on a uniform mesh
    Solve {
        #[command(flatten)]
        source: Source,
        /// Number of mesh segments
        #[arg(long = "n", value_name = "N")]
        n: usize,
        /// Write the nodal solution as CSV
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Error table over a ladder of meshes
    Convergence {
        #[command(flatten)]
        source: Source,
        /// Comma-separated segment counts
        #[arg(
            long,
            value_delimiter = ',',
            conflicts_with = "h_list",
            required_unless_present = "h_list"
        )]
        n_list: Vec<usize>,
        /// Comma-separated nominal steps; N = ceil(T/h)
        #[arg(long, value_delimiter = ',')]
        h_list: Vec<f64>,
        /// Write the report as CSV
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(ConfigError::Expression { .. }) => EXIT_PARSE,
            CliError::Config(_) | CliError::Usage(_) => EXIT_CONFIG,
            CliError::Solve(e) if e.is_numerical() => EXIT_NUMERICAL,
            CliError::Solve(_) => EXIT_CONFIG,
            CliError::Analysis(AnalysisError::Solve { source, .. }) if source.is_numerical() => EXIT_NUMERICAL,
            CliError::Analysis(AnalysisError::Exact { .. }) => EXIT_NUMERICAL,
            CliError::Analysis(_) => EXIT_CONFIG,
        }
    }
}

/// Segment count for a nominal step, `ceil(T/h)` with round-off near integers absorbed.
pub fn segments_for_step(t_end: f64, h: f64) -> usize {
    let ratio = t_end / h;
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= 1e-9 * ratio.max(1.0) {
        nearest as usize
    } else {
        ratio.ceil() as usize
    }
}

fn load(source: &Source) -> Result<Problem, CliError> {
    match (&source.config, source.example) {
        (Some(path), None) => Ok(config::load_config(path)?),
        (None, Some(id)) => Ok(config::example(id)?),
        _ => Err(CliError::Usage(
            "exactly one of --config or --example is required".into(),
        )),
    }
}

fn warn(err: &mut dyn Write, warnings: &[String]) {
    for w in warnings {
        let _ = writeln!(err, "warning: {w}");
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_owned(), |v| format!("{v:.16e}"))
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Check { source } => {
            let problem = load(&source)?;
            let diag = problem.diagnose(DEFAULT_J_MAX);
            let _ = writeln!(out, "pieces: {}", problem.pieces());
            let _ = writeln!(out, "D(0): {}", fmt_opt(diag.d0));
            let _ = writeln!(out, "x0 denominator: {}", fmt_opt(diag.x0_denominator));
            for (j, b) in diag.b.iter().enumerate() {
                let flag = if diag.flagged_b.contains(&j) { "  (~0)" } else { "" };
                let _ = writeln!(out, "B({j}): {b:.16e}{flag}");
            }
            let _ = writeln!(out, "ordering: {}", if diag.ordering_ok { "ok" } else { "violated" });
            for m in &diag.messages {
                let _ = writeln!(out, "  {m}");
            }
            warn(err, &diag.warnings);
        }
        Command::Solve { source, n, out: path } => {
            let problem = load(&source)?;
            let solution = solver::solve(&problem, n)?;
            warn(err, &solution.diagnostics().warnings);
            match path {
                Some(path) => analysis::export_csv(CsvSource::Solution(&solution), &path)?,
                None => {
                    let last = *solution.values().last().expect("N >= 2");
                    let _ = writeln!(out, "N: {n}");
                    let _ = writeln!(out, "h: {:.16e}", solution.mesh().h());
                    let _ = writeln!(out, "x0: {:.16e}", solution.x0());
                    let _ = writeln!(out, "x_N: {last:.16e}");
                    if let Some(exact) = problem.exact() {
                        let eps = analysis::max_node_error(&solution, exact)?;
                        let _ = writeln!(out, "epsilon: {eps:.16e}");
                    }
                }
            }
        }
        Command::Convergence {
            source,
            n_list,
            h_list,
            out: path,
        } => {
            let problem = load(&source)?;
            let sizes = if h_list.is_empty() {
                n_list
            } else {
                if let Some(h) = h_list.iter().find(|h| !(h.is_finite() && **h > 0.0)) {
                    return Err(CliError::Usage(format!("invalid step {h}")));
                }
                h_list.iter().map(|&h| segments_for_step(problem.t_end(), h)).collect()
            };
            warn(err, &problem.diagnose(DEFAULT_J_MAX).warnings);
            let report = analysis::convergence_study(&problem, &sizes)?;
            let _ = write!(out, "{}", report.to_table());
            if let Some(path) = path {
                analysis::export_csv(CsvSource::Report(&report), &path)?;
            }
        }
    }
    Ok(())
}

/// Runs the CLI on `argv` (including the program name), writing to the given
/// streams, and returns the process exit code.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Runs against the process's stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("vie").chain(args.iter().copied());
        let code = run_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn step_to_segments() {
        assert_eq!(segments_for_step(2.0, 1.0 / 32.0), 64);
        assert_eq!(segments_for_step(1.5 * std::f64::consts::PI, 1.0 / 32.0), 151);
        assert_eq!(segments_for_step(1.0, 0.1), 10);
    }

    #[test]
    fn check_example_two_warns() {
        let (code, out, err) = capture(&["check", "--example", "2"]);
        assert_eq!(code, 0);
        assert!(out.contains("D(0): 1.7777777777777"), "{out}");
        assert!(err.contains("sufficient condition"), "{err}");
    }

    #[test]
    fn source_is_required_and_exclusive() {
        assert_eq!(capture(&["check"]).0, EXIT_CONFIG);
        assert_eq!(
            capture(&["check", "--example", "1", "--config", "x.json"]).0,
            EXIT_CONFIG
        );
        assert_eq!(capture(&["check", "--example", "7"]).0, EXIT_CONFIG);
    }

    #[test]
    fn help_exits_cleanly() {
        let (code, out, _) = capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("convergence"));
    }

    #[test]
    fn solve_prints_summary() {
        let (code, out, _) = capture(&["solve", "--example", "1", "--n", "32"]);
        assert_eq!(code, 0);
        assert!(out.contains("epsilon: 1.30340912936"), "{out}");
    }
}
