mod chern;
mod classify;
mod dr_check;
mod glue_dims;
mod verify;

use std::collections::BTreeMap;

use serde_json::{json, Value};
use symcat_core::basecech::IntegralCohomClass;

use crate::config::{Command, ExperimentConfig};
use crate::report::{Checks, CliError, Report};

/// Seed for every random sample drawn by a command, so reports are
/// reproducible byte for byte.
pub const SEED: u64 = 0x5eed_2024;

pub fn run(config: &ExperimentConfig) -> Result<Report, CliError> {
    let mut checks = Checks::new(config.tolerance.value());
    let data = match config.command {
        Command::Verify => verify::run(config, &mut checks)?,
        Command::Classify => classify::run(config, &mut checks)?,
        Command::Chern => chern::run(config, &mut checks)?,
        Command::GlueDims => glue_dims::run(config, &mut checks)?,
        Command::DrCheck => dr_check::run(config, &mut checks)?,
    };
    Ok(Report {
        command: config.command.name().to_string(),
        checks: checks.into_vec(),
        data,
    })
}

fn class_json(c: &IntegralCohomClass) -> Value {
    json!({
        "free": c.free_coordinates,
        "torsion": c.torsion_coordinates,
        "torsion_orders": c.torsion_orders,
        "scalar": c.as_scalar(),
    })
}

fn dims_json(dims: &BTreeMap<(usize, usize), usize>) -> Value {
    dims.iter()
        .map(|(&(r, s), &dim)| json!({"r": r, "s": s, "dim": dim}))
        .collect()
}
