use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use symcat_core::linalg::Tolerance;

use crate::report::CliError;

pub const MAX_RMAX: usize = 4;
pub const MAX_LEVEL: usize = 4;
pub const MAX_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Verify,
    Classify,
    Chern,
    GlueDims,
    DrCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Classify => "classify",
            Command::Chern => "chern",
            Command::GlueDims => "glue-dims",
            Command::DrCheck => "dr-check",
        }
    }
}

/// Verification and classification experiments for symmetric tensor
/// categories glued over simplicial complexes.
#[derive(Debug, Parser)]
#[command(name = "symcat", version)]
pub struct Args {
    /// Experiment to run.
    #[arg(long, value_enum)]
    pub command: Command,
    /// JSON input file; repeat for commands taking several inputs.
    #[arg(long = "input")]
    pub inputs: Vec<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Residual threshold for every check, in (0, 1e-3].
    #[arg(long, default_value_t = Tolerance::DEFAULT.value())]
    pub tolerance: f64,
    /// Largest tensor power for arrow spaces.
    #[arg(long, default_value_t = 3)]
    pub rmax: usize,
    /// Truncation level of the DR window.
    #[arg(long, default_value_t = 3)]
    pub level: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub command: Command,
    pub inputs: Vec<PathBuf>,
    pub out: Option<PathBuf>,
    pub tolerance: Tolerance,
    pub r_max: usize,
    pub level: usize,
}

impl TryFrom<Args> for ExperimentConfig {
    type Error = CliError;

    fn try_from(args: Args) -> Result<Self, CliError> {
        if !(args.tolerance > 0.0 && args.tolerance <= MAX_TOLERANCE) {
            return Err(CliError::Config(format!(
                "tolerance {} outside (0, {MAX_TOLERANCE}]",
                args.tolerance
            )));
        }
        if args.rmax > MAX_RMAX {
            return Err(CliError::Config(format!("rmax {} above {MAX_RMAX}", args.rmax)));
        }
        if args.level > MAX_LEVEL {
            return Err(CliError::Config(format!("level {} above {MAX_LEVEL}", args.level)));
        }
        let expected = match args.command {
            Command::Verify | Command::DrCheck => 0..=1,
            Command::Classify => 2..=2,
            Command::Chern | Command::GlueDims => 1..=1,
        };
        if !expected.contains(&args.inputs.len()) {
            return Err(CliError::Config(format!(
                "{} takes {}..={} inputs, got {}",
                args.command.name(),
                expected.start(),
                expected.end(),
                args.inputs.len()
            )));
        }
        Ok(ExperimentConfig {
            command: args.command,
            inputs: args.inputs,
            out: args.out,
            tolerance: Tolerance::new(args.tolerance).map_err(|e| CliError::Config(e.to_string()))?,
            r_max: args.rmax,
            level: args.level,
        })
    }
}
