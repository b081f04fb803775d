use std::process::ExitCode;

use clap::Parser;
use linklab_cli::{run, Args, InvariantViolation};

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(report) => {
            println!("wrote {}", report.csv_path.display());
            println!("wrote {}", report.summary_path.display());
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.is::<InvariantViolation>() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
