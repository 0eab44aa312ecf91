//! Command-line front end for `bistable-core`: JSON configuration, the six
//! subcommands, deterministic CSV/JSON artifacts, and parameter sweeps.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod sweep;

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

pub use commands::{run_command, Command, Summary};
pub use config::{parse_config, Resolved, RunConfig};
pub use error::CliError;

/// One invocation: `<command> --config <path> [--out <dir>] [--sweep <field=values>]`.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: Command,
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub sweep: Option<String>,
    /// Sweep concurrency cap.
    pub threads: Option<usize>,
}

/// Reads `BW_THREADS`; unset means rayon's default.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var("BW_THREADS") {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Validation(vec![format!(
                "BW_THREADS: '{s}' is not a positive integer"
            )])),
        },
    }
}

fn read_config(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| {
        CliError::Validation(vec![format!("config: cannot read {}: {e}", path.display())])
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Validation(vec![format!("config: {e}")]))
}

/// Runs an invocation and returns the warnings to report.
pub fn execute(inv: &Invocation) -> Result<Vec<String>, CliError> {
    let raw = read_config(&inv.config)?;
    let resolved = config::from_value(raw.clone())?;
    let out = inv
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&resolved.config.output.directory));
    match &inv.sweep {
        None => run_command(inv.command, &resolved, &out).map(|s| s.warnings),
        Some(arg) => {
            let spec = sweep::parse_sweep(arg)?;
            let rows = sweep::run_sweep(inv.command, &raw, &spec, &out, inv.threads)?;
            Ok(rows
                .iter()
                .filter(|r| r.status != "ok")
                .map(|r| {
                    format!(
                        "sweep row {} ({} = {}): {}",
                        r.index, spec.field, r.value, r.status
                    )
                })
                .collect())
        }
    }
}
