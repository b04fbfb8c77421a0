use std::process::ExitCode;

use clap::Parser;
use wakemod::cli::{self, Cli};

fn main() -> ExitCode {
    let args = Cli::parse();
    let outcome = match cli::run(&args) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    print!("{}", outcome.report);
    if let Some(csv) = &outcome.csv {
        match &args.common.out {
            Some(path) => {
                if let Err(e) = std::fs::write(path, csv) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            None => print!("{csv}"),
        }
    }
    if let (Some(csv), cli::Command::Simulate(s)) = (&outcome.extra_csv, &args.command) {
        let path = s.ledger_out.as_ref().expect("ledger csv only with --ledger-out");
        if let Err(e) = std::fs::write(path, csv) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    for c in &outcome.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if outcome.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
