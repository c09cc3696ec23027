//! Subcommand implementations.

mod simulate;
mod solve;
mod sweep;

use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::cli::{Cli, Command};
use crate::config::ConfigFile;
use crate::error::{CliError, VERIFY_FAILED};
use crate::format::render;
use crate::report::{Cell, RunReport, Table};

pub use simulate::simulate;
pub use solve::{multi_stackelberg, nash, single_stackelberg};
pub use sweep::sweep;

/// Brute-force oracle grid used by `--verify`.
pub const ORACLE_STEP: f64 = 1e-4;
/// Width of the Monte Carlo acceptance band in standard errors.
pub const SIGMAS: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: RunReport,
    /// False when a `--verify` check failed.
    pub verified: bool,
}

impl Outcome {
    fn ok(report: RunReport) -> Self {
        Self { report, verified: true }
    }
}

/// Runs a command without rendering. `echo` is the invocation recorded in
/// the report.
pub fn run(cmd: &Command, echo: &str) -> Result<Outcome, CliError> {
    let file = ConfigFile::load_opt(cmd.output().config.as_deref())?;
    match cmd {
        Command::SingleStackelberg(a) => single_stackelberg(a, &file, echo),
        Command::MultiStackelberg(a) => multi_stackelberg(a, &file, echo),
        Command::Nash(a) => nash(a, &file, echo),
        Command::Simulate(a) => simulate(a, &file, echo),
        Command::Sweep(a) => sweep(a, &file, echo),
    }
}

/// Runs, renders and writes the report; returns the process exit code.
pub fn execute(cli: &Cli, echo: &str) -> Result<u8, CliError> {
    let start = Instant::now();
    let mut outcome = run(&cli.command, echo)?;
    let opts = cli.command.output();
    if opts.timing {
        outcome.report.provenance.wall_clock_s = Some(start.elapsed().as_secs_f64());
    }
    let text = render(&outcome.report, opts.format);
    match &opts.out {
        Some(path) => std::fs::write(path, &text).map_err(|source| CliError::Io { path: path.clone(), source })?,
        None => {
            let mut stdout = std::io::stdout().lock();
            // a closed pipe is not an error for a report writer
            let _ = stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush());
        }
    }
    Ok(if outcome.verified { 0 } else { VERIFY_FAILED })
}

/// Serde name of a unit enum variant.
pub(crate) fn label<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

pub(crate) fn params_json<T: Serialize>(p: &T) -> serde_json::Value {
    serde_json::to_value(p).expect("parameter types serialize")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub expected: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn absolute(name: impl Into<String>, expected: f64, observed: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            expected,
            observed,
            tolerance,
            pass: (observed - expected).abs() <= tolerance,
        }
    }

    /// Passes when `observed` is within three standard errors of `expected`.
    pub fn monte_carlo(name: impl Into<String>, expected: f64, observed: f64, se: f64) -> Self {
        Self::absolute(name, expected, observed, SIGMAS * se)
    }
}

pub(crate) fn checks_table(checks: &[Check]) -> Table {
    let mut t = Table::new(
        "verification",
        "verification",
        &["check", "expected", "observed", "tolerance", "result"],
    );
    for c in checks {
        t.push(vec![
            c.name.as_str().into(),
            c.expected.into(),
            c.observed.into(),
            c.tolerance.into(),
            verdict(c.pass).into(),
        ]);
    }
    t
}

pub(crate) fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// `(empirical - analytic) / se`, empty when the standard error is zero.
pub(crate) fn z_score(empirical: f64, analytic: f64, se: f64) -> Cell {
    if se > 0.0 {
        Cell::Num((empirical - analytic) / se)
    } else {
        Cell::Empty
    }
}
