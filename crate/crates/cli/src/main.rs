use std::io;
use std::process::ExitCode;

use clap::Parser;
use twophoton_cli::{run_command, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = run_command(
        &cli.command,
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    ExitCode::from(status.code())
}
