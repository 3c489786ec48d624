use std::process::ExitCode;

use clap::Parser;
use sct_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    // stderr stays unlocked: progress callbacks may print from worker threads
    match run(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr()) {
        Ok(outcome) => ExitCode::from(outcome.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
