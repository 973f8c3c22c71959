//! Command-line front end: argument parsing, subcommands and the result envelope.

pub mod args;
pub mod commands;
pub mod envelope;

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{bail, Result};

pub use args::Cli;
pub use envelope::{ResultEnvelope, Timing, SCHEMA_VERSION};

fn command_name(cli: &Cli) -> &'static str {
    use args::Command::*;
    match cli.command {
        Validate(_) => "validate",
        GenScenarios(_) => "gen-scenarios",
        Heuristic(_) => "heuristic",
        Solve(_) => "solve",
        Sweep(_) => "sweep",
        Eval(_) => "eval",
        Remap(_) => "remap",
        CheckUnique(_) => "check-unique",
        Fixture(_) => "fixture",
    }
}

/// Runs the parsed command and writes its envelope.
pub fn run(cli: &Cli) -> Result<()> {
    let started_unix_ms = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0);
    let clock = Instant::now();
    let outcome = commands::dispatch(&cli.command)?;
    let timing = Timing { started_unix_ms, elapsed_ms: clock.elapsed().as_millis() };
    let envelope = ResultEnvelope::new(command_name(cli), serde_json::to_value(cli)?, timing, outcome.outputs);
    match cli.report.as_ref().or(outcome.default_report.as_ref()) {
        Some(path) => {
            envelope.write(path)?;
            log::info!("wrote {}", path.display());
        }
        None => print!("{}", envelope.to_json()?),
    }
    if let Some(msg) = outcome.failure {
        bail!(msg);
    }
    Ok(())
}
