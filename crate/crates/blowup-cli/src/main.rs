mod args;
mod commands;
mod report;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use report::Outcome;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let (name, result) = match &cli.command {
        Command::Dims(a) => ("dims", commands::dims(a)),
        Command::CertifyGlobnull(a) => ("certify-globnull", commands::certify_globnull(a)),
        Command::Oracle(a) => ("oracle", commands::oracle(a)),
        Command::Logforms(a) => ("logforms", commands::logforms(a)),
        Command::Steinberg(a) => ("steinberg", commands::steinberg(a)),
        Command::Counts(a) => ("counts", commands::counts(a)),
        Command::Building(a) => ("building", commands::building(a)),
        Command::CheckIdentities(a) => ("check-identities", commands::check_identities(a)),
    };
    let elapsed = start.elapsed().as_millis();
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{name}: error: {e}");
            return ExitCode::from(1);
        }
    };
    let json = serde_json::to_string_pretty(outcome.report()).expect("reports serialize");
    let mut out = std::io::stdout().lock();
    if writeln!(out, "{json}").is_err() {
        return ExitCode::from(1);
    }
    match &outcome {
        Outcome::Success(_) => eprintln!("{name}: ok in {elapsed} ms"),
        Outcome::Violation(_, m) => eprintln!("{name}: hypothesis violated in {elapsed} ms: {m}"),
        Outcome::VerifyFailed(_, m) => eprintln!("{name}: verification failed in {elapsed} ms: {m}"),
    }
    ExitCode::from(outcome.exit_code() as u8)
}
