use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use thermoflow::commands::{run, Command, RunOptions};
use thermoflow::config::validate_config;

#[derive(Debug, Parser)]
#[command(name = "thermoflow", version, about = "Equilibrium states, suspension flows, large deviations and escape rates")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON experiment description.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output.directory`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to all cores.
    #[arg(long, env = "THERMOFLOW_THREADS")]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.command == Command::Validate {
        let diags = validate_config(&cli.config);
        for d in &diags {
            eprintln!("{d}");
        }
        return if diags.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(2) };
    }
    let options = RunOptions { config: cli.config, out: cli.out, threads: cli.threads };
    match run(cli.command, &options) {
        Ok(summary) => {
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            for f in &summary.files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("thermoflow {}: {e}", cli.command.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
