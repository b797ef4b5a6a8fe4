//! Command-line front end: `verify`, `scan`, `geodesic` and `report`.
//!
//! Exit codes: 0 pass, 1 tolerance failure, 2 configuration error,
//! 3 numeric failure.

pub mod commands;
pub mod config;
pub mod report;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::GeoError;
use crate::output::to_json_string;
use config::{Command, OutputFormat, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Pass = 0,
    ToleranceFailure = 1,
    ConfigError = 2,
    NumericFailure = 3,
}

impl ExitCode {
    pub fn of_error(e: &GeoError) -> Self {
        match e {
            GeoError::Config(_) | GeoError::Io(_) | GeoError::Shape(_) | GeoError::Precondition(_) => ExitCode::ConfigError,
            GeoError::Domain(_) | GeoError::Numeric(_) | GeoError::Geometry(_) | GeoError::Rank(_) | GeoError::Divergence { .. } => {
                ExitCode::NumericFailure
            }
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "sasakigeo", version, about = "Curvature of weighted Sasaki metrics on TM and S_rM")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Compare closed-form curvature with the coordinate oracle.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Sweep (f1, f2, r) for positive scalar curvature of S_rM.
    Scan {
        #[arg(long)]
        config: PathBuf,
    },
    /// Integrate a geodesic of the conformal-fiber metric.
    Geodesic {
        #[arg(long)]
        config: PathBuf,
    },
    /// Render a stored verify/scan/geodesic output as a table.
    Report {
        #[arg(long)]
        input: PathBuf,
    },
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { ExitCode::ConfigError } else { ExitCode::Pass };
            let _ = if e.use_stderr() { write!(stderr, "{}", e.render()) } else { write!(stdout, "{}", e.render()) };
            return code;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            ExitCode::of_error(&e)
        }
    }
}

fn load(path: &Path, expected: Command) -> crate::Result<RunConfig> {
    let cfg = RunConfig::load(path)?;
    if cfg.command() != expected {
        return Err(GeoError::Config(format!("config holds a {} block, not {}", cfg.command().name(), expected.name())));
    }
    let same = |p: &Path| p == path || (p.exists() && std::fs::canonicalize(p).ok() == std::fs::canonicalize(path).ok());
    let summary = if expected == Command::Verify { None } else { summary_path(&cfg) };
    if cfg.output.as_ref().is_some_and(|o| same(&o.path)) || summary.is_some_and(|p| same(&p)) {
        return Err(GeoError::Config("output would overwrite the config file".into()));
    }
    Ok(cfg)
}

/// Writes `body` to the configured path, or to stdout when there is none.
fn emit(cfg: &RunConfig, stdout: &mut dyn Write, body: &[u8]) -> crate::Result<()> {
    match &cfg.output {
        Some(out) => std::fs::write(&out.path, body)?,
        None => stdout.write_all(body)?,
    }
    Ok(())
}

/// Companion JSON summary next to a CSV output.
fn summary_path(cfg: &RunConfig) -> Option<PathBuf> {
    cfg.output.as_ref().map(|o| o.path.with_extension("json"))
}

fn dispatch(command: CliCommand, stdout: &mut dyn Write, stderr: &mut dyn Write) -> crate::Result<ExitCode> {
    match command {
        CliCommand::Verify { config, samples, tol } => {
            let cfg = load(&config, Command::Verify)?;
            let report = verify::run_verify(&cfg, samples, tol)?;
            let body = match cfg.output_format() {
                OutputFormat::Json => to_json_string(&report)?.into_bytes(),
                OutputFormat::Text => report.table().into_bytes(),
                OutputFormat::Csv => {
                    let mut buf = Vec::new();
                    report.write_csv(&mut buf)?;
                    buf
                }
            };
            emit(&cfg, stdout, &body)?;
            write!(stderr, "{}", verify::summary_table(&report.summary))?;
            Ok(match (&report.error, report.pass) {
                (Some(e), _) => {
                    writeln!(stderr, "numeric failure: {e}")?;
                    ExitCode::NumericFailure
                }
                (None, true) => ExitCode::Pass,
                (None, false) => ExitCode::ToleranceFailure,
            })
        }
        CliCommand::Scan { config } => {
            let cfg = load(&config, Command::Scan)?;
            let report = commands::run_scan(&cfg)?;
            let mut csv = Vec::new();
            report.write_csv(&mut csv)?;
            emit(&cfg, stdout, &csv)?;
            let summary = to_json_string(&commands::ScanSummaryFile { kind: "scan_summary", summary: &report.summary })?;
            match summary_path(&cfg) {
                Some(p) => std::fs::write(p, &summary)?,
                None => stderr.write_all(summary.as_bytes())?,
            }
            writeln!(stderr, "{}", report.summary.message)?;
            Ok(ExitCode::Pass)
        }
        CliCommand::Geodesic { config } => {
            let cfg = load(&config, Command::Geodesic)?;
            let run = commands::run_geodesic(&cfg)?;
            let mut csv = Vec::new();
            run.trajectory.write_csv(&mut csv)?;
            emit(&cfg, stdout, &csv)?;
            let summary = to_json_string(&run.summary)?;
            match summary_path(&cfg) {
                Some(p) => std::fs::write(p, &summary)?,
                None => stderr.write_all(summary.as_bytes())?,
            }
            writeln!(stderr, "G-speed drift {:.3e}", run.summary.speed_drift)?;
            Ok(if let Some(step) = run.summary.diverged_at {
                writeln!(stderr, "integration diverged at step {step}")?;
                ExitCode::NumericFailure
            } else if run.summary.pass {
                ExitCode::Pass
            } else {
                ExitCode::ToleranceFailure
            })
        }
        CliCommand::Report { input } => {
            let table = report::render(&input)?;
            stdout.write_all(table.as_bytes())?;
            Ok(ExitCode::Pass)
        }
    }
}
