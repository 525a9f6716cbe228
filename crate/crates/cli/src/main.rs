mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::Parser;
use henon_tm::Error;

use args::{Cli, Command};
use commands::{Outcome, Status};

const EXIT_FAILED: u8 = 1;
const EXIT_PRECONDITION: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;

fn diagnostic(e: &Error) -> String {
    match e {
        Error::Precondition(m) => format!("precondition violated: {m}"),
        Error::InvalidProfile(m) => format!("invalid profile: {m}"),
        Error::InvalidSample(m) => format!("invalid polar sample: {m}"),
        Error::Parse { line, msg } => format!("malformed input at line {line}: {msg}"),
        Error::Io(e) => format!("i/o error: {e}"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, format, output) = match &cli.command {
        Command::Evaluate { common, profile, moser, offset, tol } => (
            commands::evaluate(common, profile.as_deref(), moser.as_deref(), *offset, *tol),
            common.format,
            common.output.clone(),
        ),
        Command::Rearrange { common, sample, profile, tol } => (
            commands::rearrange(common, sample.as_deref(), profile.as_deref(), *tol),
            common.format,
            common.output.clone(),
        ),
        Command::Transform { common, profile, map, tol } => (
            commands::transform(common, profile, *map, *tol),
            common.format,
            common.output.clone(),
        ),
        Command::Candidate { common, report, tol } => (
            commands::candidate(common, *report, *tol),
            common.format,
            common.output.clone(),
        ),
        Command::Optimize { common, opt } => {
            (commands::optimize(common, opt), common.format, common.output.clone())
        }
        Command::Sweep { common, alphas, opt } => (
            commands::sweep(common, alphas, opt),
            common.format,
            common.output.clone(),
        ),
        Command::Threshold { tol, format, output } => {
            (commands::threshold(*tol), *format, output.clone())
        }
        Command::Verify { format, output, full } => {
            (commands::verify(*full), *format, output.clone())
        }
    };
    let Outcome { report, status } = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("henon-tm: {}", diagnostic(&e));
            return ExitCode::from(EXIT_PRECONDITION);
        }
    };
    if let Err(e) = report.emit(format, output.as_deref()) {
        eprintln!("henon-tm: i/o error: {e}");
        return ExitCode::from(EXIT_PRECONDITION);
    }
    match status {
        Status::Ok => ExitCode::SUCCESS,
        Status::Failed => {
            eprintln!("henon-tm: one or more checks failed");
            ExitCode::from(EXIT_FAILED)
        }
        Status::NotConverged => {
            eprintln!("henon-tm: optimizer did not converge; best value reported");
            ExitCode::from(EXIT_NOT_CONVERGED)
        }
    }
}
