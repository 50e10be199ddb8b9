use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use mimo_dof_cli::app::{run, Cli};

fn main() -> ExitCode {
    let output = match run(Cli::parse()) {
        Ok(output) => output,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if output.written_to.is_none() && std::io::stdout().write_all(&output.body).is_err() {
        return ExitCode::from(2);
    }
    for note in &output.notes {
        eprintln!("{note}");
    }
    for check in &output.checks {
        eprintln!("{check}");
    }
    if output.all_passed() {
        ExitCode::SUCCESS
    } else {
        eprintln!("tolerance check failed");
        ExitCode::from(1)
    }
}
