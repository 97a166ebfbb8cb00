//! Equivalence of two gluing data over the same cover.

use serde_json::{json, Value};
use symcat_core::basecech::{circle_class, det_pushforward, equivalent_mod, IntegralCohomClass};
use symcat_core::glue::{build_glued, isomorphic, GluingDatum};

use super::{class_json, dims_json};
use crate::config::ExperimentConfig;
use crate::input::load_datum;
use crate::report::{Checks, CliError};

pub fn run(config: &ExperimentConfig, checks: &mut Checks) -> Result<Value, CliError> {
    let a = load_datum(&config.inputs[0], "a", checks)?;
    let b = load_datum(&config.inputs[1], "b", checks)?;
    let (Some(a), Some(b)) = (a, b) else {
        return Ok(json!({"verdict": "invalid"}));
    };
    if a.cover() != b.cover() || a.group() != b.group() {
        return Err(CliError::Config("inputs live on different covers or fibre groups".into()));
    }
    let module = |what: &'static str| move |e: symcat_core::glue::GlueError| CliError::module(what, e);

    let cat_a = build_glued(&a, config.r_max).map_err(module("glued category a"))?;
    let cat_b = build_glued(&b, config.r_max).map_err(module("glued category b"))?;
    let (dims_a, dims_b) = (cat_a.dims(), cat_b.dims());
    let (chern_a, chern_b) = (chern_class(&a)?, chern_class(&b)?);

    let witness = isomorphic(&a, &b, config.r_max).map_err(module("isomorphism"))?;
    let verdict = if witness.is_some() { "equivalent" } else { "inequivalent" };
    let mut data = json!({
        "verdict": verdict,
        "chern": [chern_a.as_ref().map(class_json), chern_b.as_ref().map(class_json)],
        "trivializable": [trivializable(&a)?, trivializable(&b)?],
        "dims": {"a": dims_json(&dims_a), "b": dims_json(&dims_b)},
    });
    match witness {
        Some(w) => {
            checks.residual("witness.cocycle", w.cocycle_residual);
            checks.residual("functor.into_target", w.functor.into_target);
            checks.residual("functor.onto_target", w.functor.onto_target);
            checks.residual("functor.composition", w.functor.composition);
            checks.residual("functor.adjoint", w.functor.adjoint);
            checks.residual("functor.tensor", w.functor.tensor);
            checks.residual("functor.symmetry", w.functor.symmetry);
            checks.flag("functor.dims", w.dims_agree);
            data["witness"] = json!(w.units);
        }
        None => {
            let invariant = if chern_a.is_some() && chern_a != chern_b {
                json!({"kind": "chern_class"})
            } else if dims_a != dims_b {
                json!({"kind": "dimension_vector"})
            } else {
                Value::Null
            };
            data["distinguishing_invariant"] = invariant;
        }
    }
    Ok(data)
}

/// Class of the determinant line bundle; only defined for `G ⊆ SU(d)`.
fn chern_class(datum: &GluingDatum) -> Result<Option<IntegralCohomClass>, CliError> {
    if !datum.group().is_inside_special_unitary().map_err(|e| CliError::module("group", e))? {
        return Ok(None);
    }
    let line = det_pushforward(datum.cocycle()).map_err(|e| CliError::module("determinant", e))?;
    Ok(Some(circle_class(&line).map_err(|e| CliError::module("circle class", e))?))
}

fn trivializable(datum: &GluingDatum) -> Result<bool, CliError> {
    let trivial = GluingDatum::trivial(datum.cover().clone(), datum.group().clone());
    Ok(equivalent_mod(datum.cocycle(), trivial.cocycle(), datum.group())
        .map_err(|e| CliError::module("equivalence", e))?
        .is_some())
}
