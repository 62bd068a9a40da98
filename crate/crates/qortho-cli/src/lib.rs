//! The `qortho` command-line tool as a library: [`run`] maps an argument
//! vector and environment to an exit code and rendered output, so that
//! tests can drive it without spawning processes.

pub mod args;
mod commands;
pub mod config;
mod render;

use args::{Cli, Command, Format};
use clap::Parser;
use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;

pub const SCHEMA_VERSION: &str = "1";

/// Exit codes of the tool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitKind {
    Ok = 0,
    SpecError = 1,
    VerificationFailure = 2,
    NonConvergence = 3,
}

#[derive(Debug, Clone)]
pub struct CliError {
    pub exit: ExitKind,
    /// Library error variant or `usage`.
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { exit: ExitKind::SpecError, kind: "usage".into(), message: message.into() }
    }
}

impl From<qortho::Error> for CliError {
    fn from(e: qortho::Error) -> Self {
        use qortho::Error as E;
        let (exit, kind) = match &e {
            E::InvalidContext(_) => (ExitKind::SpecError, "InvalidContext"),
            E::InvalidParameter(_) => (ExitKind::SpecError, "InvalidParameter"),
            E::DomainViolation(_) => (ExitKind::SpecError, "DomainViolation"),
            E::MixedEndpoint(..) => (ExitKind::SpecError, "MixedEndpoint"),
            E::RouteMismatch { .. } => (ExitKind::VerificationFailure, "RouteMismatch"),
            E::NotSelfDual(_) => (ExitKind::VerificationFailure, "NotSelfDual"),
            E::NotSkew(_) => (ExitKind::VerificationFailure, "NotSkew"),
            E::OddDimension(_) => (ExitKind::SpecError, "OddDimension"),
            E::NonConvergent { .. } => (ExitKind::NonConvergence, "NonConvergent"),
            E::DivisionByVanishingProduct(_) => (ExitKind::NonConvergence, "DivisionByVanishingProduct"),
            E::ZeroArgument => (ExitKind::SpecError, "ZeroArgument"),
            E::Overflow(_) => (ExitKind::NonConvergence, "Overflow"),
            E::IllConditioned { .. } => (ExitKind::NonConvergence, "IllConditioned"),
            E::SingularTau(_) => (ExitKind::NonConvergence, "SingularTau"),
            E::VanishingBeta { .. } => (ExitKind::NonConvergence, "VanishingBeta"),
            E::TermBudgetExceeded { .. } => (ExitKind::SpecError, "TermBudgetExceeded"),
        };
        CliError { exit, kind: kind.into(), message: e.to_string() }
    }
}

/// A rectangular table for CSV and pretty output.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table { headers: headers.iter().map(|h| h.to_string()).collect(), rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

/// What a command produces when it runs to completion.
#[derive(Debug, Clone)]
pub struct Report {
    pub result: Value,
    pub table: Table,
    /// Set when a check inside the result failed; the result is still emitted.
    pub failure: Option<(ExitKind, String)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyInfo {
    pub name: &'static str,
    pub params: BTreeMap<&'static str, f64>,
    /// Lattice anchors; points are given as (anchor index, k).
    pub anchors: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Status {
    pub ok: bool,
    pub exit_code: i32,
    pub exit_kind: ExitKind,
    pub message: Option<String>,
    pub error_kind: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Payload {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub config: Option<config::ConfigHeader>,
    pub family: Option<FamilyInfo>,
    pub status: Status,
    pub result: Value,
}

/// Rendered output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Partition { .. } => "partition",
        Command::Sop { .. } => "sop",
        Command::Kernel { .. } => "kernel",
        Command::Correlation { .. } => "correlation",
        Command::Verify { .. } => "verify",
        Command::Tabulate { .. } => "tabulate",
    }
}

/// Runs the tool. `argv[0]` is the program name; `env` looks up
/// environment variables.
pub fn run<F: Fn(&str) -> Option<String>>(argv: &[String], env: F) -> Outcome {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { code: 0, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: ExitKind::SpecError as i32, stdout: String::new(), stderr: text },
            };
        }
    };
    let env_vars = config::capture_env(env);
    let overrides =
        config::Overrides { q: cli.q, trunc_depth: cli.trunc_depth, tail_tol: cli.tail_tol, cmp_tol: cli.cmp_tol };
    let name = command_name(&cli.command);
    let mut payload = Payload {
        schema_version: SCHEMA_VERSION,
        command: name,
        config: None,
        family: None,
        status: Status { ok: true, exit_code: 0, exit_kind: ExitKind::Ok, message: None, error_kind: None },
        result: Value::Null,
    };
    let mut table = Table::default();
    let outcome = config::resolve(&overrides, &env_vars).and_then(|(ctx, header)| {
        payload.config = Some(header);
        commands::dispatch(&cli.command, &ctx, &mut payload.family)
    });
    match outcome {
        Ok(report) => {
            payload.result = report.result;
            table = report.table;
            if let Some((exit, msg)) = report.failure {
                payload.status = Status {
                    ok: false,
                    exit_code: exit as i32,
                    exit_kind: exit,
                    message: Some(msg),
                    error_kind: Some("CheckFailed".into()),
                };
            }
        }
        Err(e) => {
            payload.status = Status {
                ok: false,
                exit_code: e.exit as i32,
                exit_kind: e.exit,
                message: Some(e.message.clone()),
                error_kind: Some(e.kind.clone()),
            };
        }
    }
    let stderr = match &payload.status.message {
        Some(m) if !payload.status.ok => format!("qortho {name}: {m}\n"),
        _ => String::new(),
    };
    let stdout = match cli.format {
        Format::Json => render::json(&payload),
        Format::Csv => render::csv(&payload, &table),
        Format::Pretty => render::pretty(&payload, &table),
    };
    Outcome { code: payload.status.exit_code, stdout, stderr }
}
