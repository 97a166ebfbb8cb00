//! Chern class of the twisted special object, computed two ways.

use serde_json::{json, Value};
use symcat_core::glue::{build_glued, extract_twisted_special};

use super::class_json;
use crate::config::ExperimentConfig;
use crate::input::load_datum;
use crate::report::{Checks, CliError};

pub fn run(config: &ExperimentConfig, checks: &mut Checks) -> Result<Value, CliError> {
    let Some(datum) = load_datum(&config.inputs[0], "datum", checks)? else {
        return Ok(Value::Null);
    };
    let cat = build_glued(&datum, 0).map_err(|e| CliError::module("glued category", e))?;
    let ts = extract_twisted_special(&cat).map_err(|e| CliError::module("twisted special object", e))?;
    checks.flag("chern.agree", ts.agree);
    checks.residual("chern.frames", ts.frame_residual);
    checks.residual("twisted_special.identities", ts.tso_residual);
    let phases: Vec<Value> = ts
        .transition_phases
        .iter()
        .map(|((i, j), q)| json!({"edge": [i, j], "phase": q}))
        .collect();
    Ok(json!({
        "extraction": class_json(&ts.class),
        "pushforward": class_json(&ts.pushforward_class),
        "agree": ts.agree,
        "global_sections": ts.v_module.len(),
        "transition_phases": phases,
    }))
}
