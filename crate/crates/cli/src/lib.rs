//! Command-line front end: configuration parsing, job execution and CSV/JSON emission.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod jobs;
pub mod output;

use std::fmt;

pub use config::{parse_config, Command, Format, RunConfig};
pub use output::{emit_json, emit_series, flatten, CsvRow, HEADER};

/// Exit status: every emitted status is `pass`.
pub const EXIT_PASS: i32 = 0;
/// At least one emitted status is `fail`.
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Clap(clap::Error),
    Usage(String),
    Core(renv_core::Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) if !e.use_stderr() => EXIT_PASS,
            CliError::Clap(_) | CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(renv_core::Error::ParamConstraintViolated(_))
            | CliError::Core(renv_core::Error::NoFeasibleEpsilon { .. })
            | CliError::Core(renv_core::Error::LambdaTooLarge { .. }) => EXIT_USAGE,
            CliError::Core(_) | CliError::Io(_) => EXIT_INTERNAL,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Clap(e) => write!(f, "{}", e.render().to_string().trim_end()),
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Core(e) => write!(f, "error: {e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<renv_core::Error> for CliError {
    fn from(e: renv_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Executes a parsed configuration, writes its artifacts and returns the exit code.
pub fn run(cfg: &RunConfig) -> Result<i32, CliError> {
    let reports = jobs::execute(cfg)?;
    let rows: Vec<CsvRow> = reports.iter().flat_map(flatten).collect();
    match cfg.format {
        Format::Csv => emit_series(cfg.out.as_deref(), &rows)?,
        Format::Json => emit_json(cfg.out.as_deref(), &reports)?,
    }
    for r in &reports {
        eprintln!(
            "{} {} (worst {:.3e}, slack {:.3e}, seed {})",
            if r.pass { "PASS" } else { "FAIL" },
            r.suite,
            r.worst_violation,
            r.slack,
            r.seed
        );
    }
    Ok(if rows.iter().all(|r| r.pass) { EXIT_PASS } else { EXIT_FAIL })
}

/// Whole program: parse, run, report errors on standard error.
pub fn main_with(argv: &[String], env_seed: Option<&str>) -> i32 {
    let result = parse_config(argv, env_seed).and_then(|cfg| run(&cfg));
    match result {
        Ok(code) => code,
        Err(CliError::Clap(e)) if !e.use_stderr() => {
            print!("{}", e.render());
            EXIT_PASS
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
