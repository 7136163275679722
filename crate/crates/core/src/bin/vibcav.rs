use std::process::ExitCode;

use clap::Parser;
use vibcav::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli, std::env::vars()) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            if outcome.converged {
                ExitCode::SUCCESS
            } else {
                eprintln!("warning: a fit did not converge; see fit_report.txt");
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
