//! Invariant suite for one fibre group (SU(2) unless a group file is given).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use symcat_core::basecech::{
    circle_class_with, h2_integral, phase_cocycle_for_class, Cover, IntegralCohomClass, SimplicialComplex,
};
use symcat_core::dralg::{fixed_points, rhoeps_residual};
use symcat_core::glue::{build_glued, extract_twisted_special, global_norm, norm_function, GluingDatum};
use symcat_core::groups::{lie_basis, GroupKind, GroupSpec};
use symcat_core::linalg::{orthonormality_defect, projection_residual};
use symcat_core::repcat::{conjugate_pair, intertwiner_residual, intertwiners, permutation_span, special_isometry};

use super::{class_json, SEED};
use crate::config::ExperimentConfig;
use crate::input::load_group;
use crate::report::{Checks, CliError};

const NORM_SAMPLES: usize = 20;

pub fn run(config: &ExperimentConfig, checks: &mut Checks) -> Result<Value, CliError> {
    let group = match config.inputs.first() {
        Some(path) => load_group(path)?,
        None => GroupSpec::special_unitary(2),
    };
    let err = |what: &str| {
        let what = what.to_string();
        move |e: symcat_core::repcat::RepcatError| CliError::module(what.clone(), e)
    };
    let d = group.degree();
    let r_max = config.r_max;

    let special = special_isometry(d).map_err(err("special isometry"))?;
    let res = special.residuals().map_err(err("special isometry"))?;
    checks.residual("special.isometry", res.isometry);
    checks.residual("special.projector", res.projector);
    checks.residual("special.contraction", res.contraction);

    let conj = conjugate_pair(d);
    let (left, right) = conj.equation_residuals();
    checks.residual("conjugate.left", left);
    checks.residual("conjugate.right", right);
    checks.residual("conjugate.dimension", (conj.dim_value - d as f64).abs());
    let samples: Vec<_> = match group.kind() {
        GroupKind::FiniteMatrix => group.generators().to_vec(),
        _ => lie_basis(&group)
            .map_err(|e| CliError::module("lie basis", e))?
            .matrices
            .iter()
            .map(|x| x.exp())
            .collect(),
    };
    let invariance = samples.iter().map(|g| conj.invariance_residual(g)).fold(0.0, f64::max);
    checks.residual("conjugate.invariance", invariance);

    let mut dims = Vec::new();
    let mut worst_intertwiner: f64 = 0.0;
    let mut worst_orthonormal: f64 = 0.0;
    let mut worst_rhoeps: f64 = 0.0;
    for r in 0..=r_max {
        for s in 0..=r_max {
            let space = intertwiners(&group, r, s).map_err(err("intertwiners"))?;
            for t in &space.basis {
                worst_intertwiner = worst_intertwiner.max(intertwiner_residual(&group, t, r, s).map_err(err("residual"))?);
                worst_rhoeps = worst_rhoeps.max(rhoeps_residual(t, r, s, d));
            }
            worst_orthonormal = worst_orthonormal.max(orthonormality_defect(&space.basis));
            dims.push(json!({"r": r, "s": s, "dim": space.dim()}));
            if group.kind() == GroupKind::FullUnitary && r != s {
                checks.exact(format!("schur_weyl.vanishing.{r}.{s}"), space.dim() as i64, 0);
            }
            if group.kind() != GroupKind::FiniteMatrix && r == s && r <= 3 {
                let perms = permutation_span(d, r).map_err(err("permutations"))?;
                checks.exact(format!("schur_weyl.dim.{r}"), space.dim() as i64, perms.len() as i64);
            }
        }
    }
    checks.residual("intertwiners.residual", worst_intertwiner);
    checks.residual("intertwiners.orthonormality", worst_orthonormal);
    checks.residual("dr.rhoeps", worst_rhoeps);

    let mut worst_fixed: f64 = 0.0;
    for r in 0..=r_max.min(2) {
        for s in 0..=r_max.min(2) {
            let fixed = fixed_points(&group, r, s).map_err(|e| CliError::module("fixed points", e))?;
            let space = intertwiners(&group, r, s).map_err(err("intertwiners"))?;
            checks.exact(format!("fixed_points.dim.{r}.{s}"), fixed.len() as i64, space.dim() as i64);
            for f in &fixed {
                worst_fixed = worst_fixed.max(projection_residual(f, &space.basis));
            }
            for b in &space.basis {
                worst_fixed = worst_fixed.max(projection_residual(b, &fixed));
            }
        }
    }
    checks.residual("fixed_points.projection", worst_fixed);

    let octahedron = SimplicialComplex::octahedron();
    let h2 = h2_integral(&octahedron);
    checks.exact("h2.octahedron.free_rank", h2.free_rank as i64, 1);
    checks.exact("h2.octahedron.torsion", h2.torsion_orders.len() as i64, 0);

    let trivial = GluingDatum::trivial(Cover::star(octahedron), group.clone());
    let cat = build_glued(&trivial, r_max).map_err(|e| CliError::module("glued category", e))?;
    let mut local_dims: i64 = 0;
    for (&(r, s), &dim) in &cat.dims() {
        let fibre = intertwiners(&group, r, s).map_err(err("intertwiners"))?.dim();
        local_dims = local_dims.max((dim as i64 - fibre as i64).abs());
    }
    checks.exact("glue.trivial.dims", local_dims, 0);
    let closure = cat.closure_residuals().map_err(|e| CliError::module("closure", e))?;
    checks.residual("glue.trivial.closure", closure.composition.max(closure.adjoint).max(closure.tensor));
    checks.residual("glue.trivial.compatibility", closure.compatibility);

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let spaces: Vec<(usize, usize)> = cat.dims().into_iter().filter(|&(_, dim)| dim > 0).map(|(k, _)| k).collect();
    let mut worst_norm: f64 = 0.0;
    for k in 0..NORM_SAMPLES {
        let (r, s) = spaces[k % spaces.len()];
        let t = cat.random_arrow(r, s, &mut rng).map_err(|e| CliError::module("random arrow", e))?;
        worst_norm = worst_norm.max((global_norm(&t) - norm_function(&t).sup).abs());
    }
    checks.residual("glue.norm_sup", worst_norm);

    let chern = chern_on_moore_space(&group, checks)?;
    Ok(json!({
        "group": {"kind": group.kind(), "degree": d},
        "intertwiner_dims": dims,
        "h2_octahedron": {"free_rank": h2.free_rank, "torsion": h2.torsion_orders},
        "chern_moore_space": chern,
    }))
}

/// Extraction and pushforward classes for scalar data realizing every
/// class of `H²(M(ℤ/3, 1), ℤ) = ℤ/3`.
fn chern_on_moore_space(group: &GroupSpec, checks: &mut Checks) -> Result<Value, CliError> {
    if !group.is_inside_special_unitary().map_err(|e| CliError::module("group", e))? {
        return Ok(Value::Null);
    }
    let cover = Cover::star(SimplicialComplex::moore_space(3));
    let h2 = h2_integral(cover.complex());
    let mut rows = Vec::new();
    for k in 0..3 {
        let class = IntegralCohomClass {
            free_coordinates: vec![],
            torsion_coordinates: vec![k],
            torsion_orders: vec![3],
        };
        let phases = phase_cocycle_for_class(&cover, &class).map_err(|e| CliError::module("moore space", e))?;
        checks.flag(
            format!("chern.moore.{k}.realized"),
            circle_class_with(&phases, &h2).map_err(|e| CliError::module("moore space", e))? == class,
        );
        let datum = match GluingDatum::scalar_phases(group.clone(), &phases) {
            Ok(datum) => datum,
            // The centre of SU(d) is not inside a finite G: scalar data are unavailable.
            Err(_) => return Ok(Value::Null),
        };
        let cat = build_glued(&datum, 0).map_err(|e| CliError::module("glued category", e))?;
        let ts = extract_twisted_special(&cat).map_err(|e| CliError::module("twisted special", e))?;
        checks.flag(format!("chern.moore.{k}.agree"), ts.agree && ts.class == class);
        checks.residual(format!("chern.moore.{k}.frames"), ts.frame_residual);
        rows.push(json!({
            "class": k,
            "extracted": class_json(&ts.class),
            "pushforward": class_json(&ts.pushforward_class),
        }));
    }
    Ok(Value::Array(rows))
}
