//! DR algebra identities on a truncation window (quaternion group unless a
//! group file is given).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use symcat_core::dralg::{
    canonical_endo, circle_action, dr_mul, dr_unit, fixed_points, gauge_action, inner_endo_nu, rhoeps_residual,
    stabilizer_test, DrElement, DrError, DrWindow,
};
use symcat_core::groups::{catalog, verify_normalizer, GroupSpec};
use symcat_core::linalg::{cx, projection_residual, turns, ComplexMatrix};
use symcat_core::repcat::{antisym_projector, intertwiners, special_isometry};

use super::SEED;
use crate::config::ExperimentConfig;
use crate::input::load_group;
use crate::report::{Checks, CliError};

const SAMPLES: usize = 12;
const STABILIZER_PAIRS: usize = 20;
/// Phases `exp(2πi k/8)` multiplying binary octahedral elements give the
/// candidate normalizer elements in degree 2.
const PHASE_STEPS: usize = 8;

fn dr(e: DrError) -> CliError {
    CliError::module("dr algebra", e)
}

fn random_element(rng: &mut ChaCha8Rng, w: &DrWindow, r: usize, s: usize) -> Result<DrElement<ComplexMatrix>, CliError> {
    let (rows, cols) = (w.d.pow(s as u32), w.d.pow(r as u32));
    let m = ComplexMatrix::from_fn(rows, cols, |_, _| cx(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    DrElement::new(w, r, s, m).map_err(dr)
}

pub fn run(config: &ExperimentConfig, checks: &mut Checks) -> Result<Value, CliError> {
    let group = match config.inputs.first() {
        Some(path) => load_group(path)?,
        None => catalog::quaternion(),
    };
    let d = group.degree();
    let n = config.level;
    let window = DrWindow::new(d, n, d);

    let mut worst_rhoeps: f64 = 0.0;
    let mut worst_fixed: f64 = 0.0;
    let mut dim_mismatch: i64 = 0;
    for r in 0..=n {
        for s in 0..=n {
            let space = intertwiners(&group, r, s).map_err(|e| CliError::module("intertwiners", e))?;
            for t in &space.basis {
                worst_rhoeps = worst_rhoeps.max(rhoeps_residual(t, r, s, d));
            }
            let fixed = fixed_points(&group, r, s).map_err(dr)?;
            dim_mismatch += (fixed.len() as i64 - space.dim() as i64).abs();
            for f in &fixed {
                worst_fixed = worst_fixed.max(projection_residual(f, &space.basis));
            }
            for b in &space.basis {
                worst_fixed = worst_fixed.max(projection_residual(b, &fixed));
            }
        }
    }
    checks.residual("rhoeps", worst_rhoeps);
    checks.exact("fixed_points.dims", dim_mismatch, 0);
    checks.residual("fixed_points.projection", worst_fixed);

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let s_elem = DrElement::new(
        &window,
        0,
        d,
        special_isometry(d).map_err(|e| CliError::module("special isometry", e))?.s,
    )
    .map_err(dr)?;
    let vbasis = [s_elem];
    let nu_one = inner_endo_nu(&vbasis, &dr_unit(&window), &window).map_err(dr)?;
    let p = antisym_projector(d, d).map_err(|e| CliError::module("projector", e))?;
    checks.residual("nu.unit", nu_one.value.distance(&p));

    let gens: Vec<ComplexMatrix> = group.generators().to_vec();
    let (mut circle_auto, mut circle_zero, mut nu_circle, mut nu_adjoint): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    let (mut endo_mul, mut endo_gauge): (f64, f64) = (0.0, 0.0);
    for _ in 0..SAMPLES {
        let z = turns(rng.random_range(0.0..1.0));
        let (r, s) = (rng.random_range(0..=n), rng.random_range(0..=n));
        let a = random_element(&mut rng, &window, r, s)?;
        // b ∈ (q, t) with q ≤ t ≤ r: padding b to a's source stays inside the window.
        let t = rng.random_range(0..=r);
        let q = rng.random_range(0..=t);
        let b = random_element(&mut rng, &window, q, t)?;
        let ab = dr_mul(&a, &b, &window).map_err(dr)?;
        let lhs = circle_action(z, &ab).map_err(dr)?;
        let rhs = dr_mul(&circle_action(z, &a).map_err(dr)?, &circle_action(z, &b).map_err(dr)?, &window).map_err(dr)?;
        circle_auto = circle_auto.max(lhs.distance(&rhs, &window).map_err(dr)?);

        let c = random_element(&mut rng, &window, r, r)?;
        circle_zero = circle_zero.max(circle_action(z, &c).map_err(dr)?.value.distance(&c.value));

        let nu_z = inner_endo_nu(&vbasis, &circle_action(z, &a).map_err(dr)?, &window).map_err(dr)?;
        let z_nu = circle_action(z, &inner_endo_nu(&vbasis, &a, &window).map_err(dr)?).map_err(dr)?;
        nu_circle = nu_circle.max(nu_z.distance(&z_nu, &window).map_err(dr)?);
        let nu_star = inner_endo_nu(&vbasis, &a.adjoint(), &window).map_err(dr)?;
        let star_nu = inner_endo_nu(&vbasis, &a, &window).map_err(dr)?.adjoint();
        nu_adjoint = nu_adjoint.max(nu_star.distance(&star_nu, &window).map_err(dr)?);

        if ab.r.max(ab.s) < window.max_power && a.r.max(a.s) < window.max_power && b.r.max(b.s) < window.max_power {
            let lhs = canonical_endo(&ab, &window).map_err(dr)?;
            let rhs = dr_mul(
                &canonical_endo(&a, &window).map_err(dr)?,
                &canonical_endo(&b, &window).map_err(dr)?,
                &window,
            )
            .map_err(dr)?;
            endo_mul = endo_mul.max(lhs.distance(&rhs, &window).map_err(dr)?);
        }
        if let Some(g) = gens.first() {
            if a.r.max(a.s) < window.max_power {
                let lhs = canonical_endo(&gauge_action(g, &a), &window).map_err(dr)?;
                let rhs = gauge_action(g, &canonical_endo(&a, &window).map_err(dr)?);
                endo_gauge = endo_gauge.max(lhs.value.distance(&rhs.value));
            }
        }
    }
    checks.residual("circle.automorphic", circle_auto);
    checks.residual("circle.grade_zero", circle_zero);
    checks.residual("nu.circle", nu_circle);
    checks.residual("nu.adjoint", nu_adjoint);
    checks.residual("canonical_endo.multiplicative", endo_mul);
    checks.residual("canonical_endo.gauge", endo_gauge);

    let stabilizer = stabilizer_pairs(&group, n, &mut rng, checks)?;
    Ok(json!({
        "group": {"kind": group.kind(), "degree": d, "order": group.order().ok()},
        "level": n,
        "stabilizer": stabilizer,
    }))
}

/// Candidate normalizer elements: `T·2O` in degree 2, else the generators.
fn normalizer_candidates(group: &GroupSpec) -> Result<Vec<ComplexMatrix>, CliError> {
    let d = group.degree();
    let mut pool = Vec::new();
    if d == 2 && group.is_finite() {
        let octahedral = catalog::binary_octahedral();
        let elements = octahedral.elements().map_err(|e| CliError::module("binary octahedral group", e))?;
        for k in 0..PHASE_STEPS {
            let phase = turns(k as f64 / PHASE_STEPS as f64);
            pool.extend(elements.iter().map(|g| g.scale(phase)));
        }
    } else {
        pool.push(ComplexMatrix::identity(d));
        pool.extend(group.generators().iter().cloned());
    }
    Ok(pool.into_iter().filter(|u| verify_normalizer(u, group).is_ok()).collect())
}

fn stabilizer_pairs(
    group: &GroupSpec,
    level: usize,
    rng: &mut ChaCha8Rng,
    checks: &mut Checks,
) -> Result<Value, CliError> {
    let pool = normalizer_candidates(group)?;
    let mut rows = Vec::new();
    let mut mismatches = 0;
    let elements = if group.is_finite() {
        group.elements().map_err(|e| CliError::module("group", e))?.to_vec()
    } else {
        Vec::new()
    };
    for k in 0..STABILIZER_PAIRS {
        let u = pool[rng.random_range(0..pool.len())].clone();
        // Every other pair has v ∈ G·u, so both verdicts occur.
        let v = if k % 2 == 0 && !elements.is_empty() {
            &elements[rng.random_range(0..elements.len())] * &u
        } else {
            pool[rng.random_range(0..pool.len())].clone()
        };
        let report = stabilizer_test(&u, &v, group, level).map_err(dr)?;
        if !report.consistent() {
            mismatches += 1;
        }
        rows.push(json!({"agree": report.agree, "in_group": report.in_group, "witness": report.witness}));
    }
    checks.exact("stabilizer.faithful", mismatches, 0);
    Ok(json!({"candidates": pool.len(), "pairs": rows}))
}
