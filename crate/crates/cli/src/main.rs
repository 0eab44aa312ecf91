use std::path::PathBuf;
use std::process::ExitCode;

use bistable_waves::{execute, threads_from_env, Command, Invocation};
use clap::Parser;

#[derive(Debug, Parser)]
#[command(
    name = "bistable-waves",
    version,
    about = "Traveling waves of bistable equations with a discontinuous nonlinearity"
)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output.directory`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Parameter sweep, `field=v1,v2,...` (e.g. `reaction.a=0.1,0.2`).
    #[arg(long)]
    sweep: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = threads_from_env().and_then(|threads| {
        execute(&Invocation {
            command: cli.command,
            config: cli.config,
            out: cli.out,
            sweep: cli.sweep,
            threads,
        })
    });
    match result {
        Ok(warnings) => {
            for w in warnings {
                eprintln!("warning: {w}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
