mod cli;
mod commands;
mod output;
mod settings;

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::{json, Value};

use cli::{Cli, Command};
use commands::{write_csv, Outcome};
use output::{canonical_json, to_value, RunManifest};
use settings::Settings;

pub const EXIT_FAILED: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NONCONVERGENCE: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub msg: String,
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError {
            code: EXIT_VALIDATION,
            msg: msg.into(),
        }
    }

    pub fn io(msg: impl Into<String>) -> Self {
        CliError {
            code: EXIT_FAILED,
            msg: msg.into(),
        }
    }
}

impl From<lpneg::Error> for CliError {
    fn from(e: lpneg::Error) -> Self {
        let code = if e.is_validation() {
            EXIT_VALIDATION
        } else {
            EXIT_NONCONVERGENCE
        };
        CliError { code, msg: e.to_string() }
    }
}

fn subcommand_parts(cmd: &Command) -> (&'static str, Value) {
    match cmd {
        Command::Transform(a) => ("transform", to_value(a)),
        Command::Signscan(a) => ("signscan", to_value(a)),
        Command::Certify(a) => ("certify", to_value(a)),
        Command::Critical(a) => ("critical", to_value(a)),
        Command::Simulate(a) => ("simulate", to_value(a)),
        Command::Selftest(a) => ("selftest", to_value(a)),
        Command::Gammaq(a) => ("gammaq", to_value(a)),
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let start = Instant::now();
    let settings = Settings::load(cli.config.as_deref())?;
    let (name, args) = subcommand_parts(&cli.command);
    let params = json!({ "args": args, "settings": to_value(&settings) });
    // Side files carry the parameter echo; the full manifest goes with the report.
    let side_manifest = json!({
        "tool_version": env!("CARGO_PKG_VERSION"),
        "subcommand": name,
        "params": params,
    });
    let sink = |path: &Path, header: Vec<String>, rows: Vec<Vec<String>>| write_csv(path, &side_manifest, header, rows);
    let outcome: Outcome = match &cli.command {
        Command::Transform(a) => commands::transform(a, &settings)?,
        Command::Signscan(a) => commands::signscan(a, &settings, &sink)?,
        Command::Certify(a) => commands::certify(a)?,
        Command::Critical(a) => commands::critical(a, &settings)?,
        Command::Simulate(a) => commands::simulate(a, &settings, &sink)?,
        Command::Selftest(a) => commands::selftest(a)?,
        Command::Gammaq(a) => commands::gammaq(a, &settings, &sink)?,
    };
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").into(),
        subcommand: name.into(),
        params,
        seed: outcome.seed,
        partitions: outcome.partitions,
        errors: outcome.errors,
        wall_time_s: cli.timing.then(|| start.elapsed().as_secs_f64()),
    };
    let doc = json!({ "manifest": to_value(&manifest), "report": outcome.report });
    let text = canonical_json(&doc);
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    if let Some(msg) = outcome.message {
        eprintln!("{msg}");
    }
    Ok(outcome.exit)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}
