//! Dimensions of the glued arrow spaces and closure residuals.

use serde_json::{json, Value};
use symcat_core::glue::build_glued;
use symcat_core::repcat::intertwiners;

use super::dims_json;
use crate::config::ExperimentConfig;
use crate::input::load_datum;
use crate::report::{Checks, CliError};

pub fn run(config: &ExperimentConfig, checks: &mut Checks) -> Result<Value, CliError> {
    let Some(datum) = load_datum(&config.inputs[0], "datum", checks)? else {
        return Ok(Value::Null);
    };
    let cat = build_glued(&datum, config.r_max).map_err(|e| CliError::module("glued category", e))?;
    let closure = cat.closure_residuals().map_err(|e| CliError::module("closure", e))?;
    checks.residual("glue.composition", closure.composition);
    checks.residual("glue.adjoint", closure.adjoint);
    checks.residual("glue.tensor", closure.tensor);
    checks.residual("glue.compatibility", closure.compatibility);
    checks.residual("glue.locality", closure.locality);

    let dims = cat.dims();
    let mut fibre = Vec::new();
    for &(r, s) in dims.keys() {
        let dim = intertwiners(datum.group(), r, s)
            .map_err(|e| CliError::module("intertwiners", e))?
            .dim();
        fibre.push(json!({"r": r, "s": s, "dim": dim}));
    }
    Ok(json!({
        "patches": datum.patch_count(),
        "glued": dims_json(&dims),
        "fibre": fibre,
    }))
}
