use std::process::ExitCode;

use clap::Parser;
use hfvs_harness::cli::{execute, Cli};
use hfvs_harness::HarnessError;

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(report) => {
            println!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, HarnessError::Usage(_)) { 2 } else { 1 })
        }
    }
}
