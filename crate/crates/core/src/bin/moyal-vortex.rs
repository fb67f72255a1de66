use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use moyal_vortex::config::DEFAULTS_HELP;
use moyal_vortex::harness::{run_cli, Command};

/// Vortex dynamics in a Moyal-deformed nonlinear Schrödinger model.
#[derive(Parser, Debug)]
#[command(name = "moyal-vortex", version, after_help = DEFAULTS_HELP)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON experiment config; absent keys take the defaults listed below.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding `output_dir` in the config.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let code = run_cli(cli.command, &cli.config, cli.output.as_deref());
    ExitCode::from(code as u8)
}
