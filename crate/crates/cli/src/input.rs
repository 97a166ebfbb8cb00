use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use symcat_core::basecech::{is_cocycle_mod, CechCocycle, Cover};
use symcat_core::glue::{GlueError, GluingDatum, GluingDatumJson};
use symcat_core::groups::GroupSpec;

use crate::report::{CliError, Checks};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::InputParse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn load_group(path: &Path) -> Result<GroupSpec, CliError> {
    read_json(path)
}

/// Loads a gluing datum. Cocycle and normalizer failures are recorded as
/// failed checks and yield `None`; anything else is an input error.
pub fn load_datum(path: &Path, label: &str, checks: &mut Checks) -> Result<Option<GluingDatum>, CliError> {
    let raw: GluingDatumJson = read_json(path)?;
    let context = path.display().to_string();
    let cover = Cover::star(raw.complex);
    let cocycle = CechCocycle::from_json(cover, &raw.cocycle).map_err(|e| CliError::module(&context, e))?;
    let validity = is_cocycle_mod(&cocycle, &raw.group).map_err(|e| CliError::module(&context, e))?;
    match GluingDatum::new(raw.group, cocycle) {
        Ok(datum) => {
            checks.residual(format!("{label}.cocycle"), validity.max_residual);
            checks.flag(format!("{label}.normalizer"), true);
            Ok(Some(datum))
        }
        Err(GlueError::NotACocycleModG { residual, .. }) => {
            checks.failed(format!("{label}.cocycle"), residual);
            Ok(None)
        }
        Err(GlueError::NotInNormalizer(..)) => {
            checks.flag(format!("{label}.normalizer"), false);
            Ok(None)
        }
        Err(e) => Err(CliError::module(context, e)),
    }
}
