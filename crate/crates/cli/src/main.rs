use std::process::ExitCode;

use clap::Parser;
use gratingprob_cli::{run, RunConfig};

fn main() -> ExitCode {
    // clap prints its own message and exits with status 2 on bad usage
    let config = RunConfig::parse();
    match run(&config) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
