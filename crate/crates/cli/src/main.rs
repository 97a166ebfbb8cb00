mod commands;
mod config;
mod input;
mod report;

use std::fs;
use std::process::ExitCode;

use clap::Parser;

use config::{Args, ExperimentConfig};
use report::CliError;

const EXIT_VERIFICATION: u8 = 1;
const EXIT_INPUT: u8 = 2;

fn run(args: Args) -> Result<bool, CliError> {
    let config = ExperimentConfig::try_from(args)?;
    let report = commands::run(&config)?;
    let text = report.to_json();
    match &config.out {
        Some(path) => fs::write(path, &text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?,
        None => print!("{text}"),
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_INPUT);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFICATION),
        Err(e) => {
            eprintln!("symcat: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
