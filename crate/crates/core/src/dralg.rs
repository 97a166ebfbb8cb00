//! Truncated Doplicher–Roberts algebra.
//!
//! An element is an arrow `t ∈ (r, s)`, identified with `t ⊗ 1 ∈ (r+1, s+1)`;
//! its grade is `s − r`. Products pad the shorter side with identity
//! factors and compose. Everything lives in a finite window of powers.

use serde::Serialize;
use thiserror::Error;

use crate::glue::GluedArrow;
use crate::groups::{find_element, lie_basis, verify_normalizer, GroupError, GroupKind, GroupSpec};
use crate::linalg::{span_basis, ComplexMatrix, Cx, Tolerance};
use crate::repcat::{block_swap, hat_action, intertwiners, tensor_power, RepcatError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DrError {
    #[error("power {power} leaves the truncation window (max {max})")]
    TruncationOverflow { power: usize, max: usize },
    #[error("|z| = {0} is not 1")]
    NotUnitScalar(f64),
    #[error("element of shape ({r}, {s}) does not match its value")]
    Shape { r: usize, s: usize },
    #[error(transparent)]
    Repcat(#[from] RepcatError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Arrows that can serve as values of DR elements.
pub trait DrArrow: Clone {
    /// `self ∘ other`.
    fn compose(&self, other: &Self) -> Self;
    fn adjoint(&self) -> Self;
    /// `self ⊗ 1^{⊗k}`.
    fn pad_right(&self, d: usize, k: usize) -> Self;
    /// `1 ⊗ self`.
    fn pad_left(&self, d: usize) -> Self;
    fn scale(&self, z: Cx) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn distance(&self, other: &Self) -> f64;
    fn frobenius(&self) -> f64;
    /// `t₀` with `self = t₀ ⊗ 1`, if such a factorization holds within `tol`.
    fn strip_right(&self, d: usize, tol: Tolerance) -> Option<Self>;
    /// `g^{⊗s} · self · (g^{⊗r})*`.
    fn gauge(&self, g: &ComplexMatrix, r: usize, s: usize) -> Self;
    fn shape_matches(&self, d: usize, r: usize, s: usize) -> bool;
}

fn strip_matrix(t: &ComplexMatrix, d: usize, tol: Tolerance) -> Option<ComplexMatrix> {
    if !t.rows().is_multiple_of(d) || !t.cols().is_multiple_of(d) || t.rows() < d || t.cols() < d {
        return None;
    }
    let t0 = t.partial_trace_last(d).scale_real(1.0 / d as f64);
    let back = t0.kron(&ComplexMatrix::identity(d));
    (back.distance(t) <= tol.value() * t.frobenius_norm().max(1.0)).then_some(t0)
}

impl DrArrow for ComplexMatrix {
    fn compose(&self, other: &Self) -> Self {
        self * other
    }
    fn adjoint(&self) -> Self {
        ComplexMatrix::adjoint(self)
    }
    fn pad_right(&self, d: usize, k: usize) -> Self {
        self.kron(&ComplexMatrix::identity(d.pow(k as u32)))
    }
    fn pad_left(&self, d: usize) -> Self {
        ComplexMatrix::identity(d).kron(self)
    }
    fn scale(&self, z: Cx) -> Self {
        ComplexMatrix::scale(self, z)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn distance(&self, other: &Self) -> f64 {
        ComplexMatrix::distance(self, other)
    }
    fn frobenius(&self) -> f64 {
        self.frobenius_norm()
    }
    fn strip_right(&self, d: usize, tol: Tolerance) -> Option<Self> {
        strip_matrix(self, d, tol)
    }
    fn gauge(&self, g: &ComplexMatrix, r: usize, s: usize) -> Self {
        hat_action(g, self, r, s).expect("gauge shape")
    }
    fn shape_matches(&self, d: usize, r: usize, s: usize) -> bool {
        self.shape() == (d.pow(s as u32), d.pow(r as u32))
    }
}

impl DrArrow for GluedArrow {
    fn compose(&self, other: &Self) -> Self {
        GluedArrow::compose(self, other).expect("composable glued arrows")
    }
    fn adjoint(&self) -> Self {
        GluedArrow::adjoint(self)
    }
    fn pad_right(&self, d: usize, k: usize) -> Self {
        let id = ComplexMatrix::identity(d.pow(k as u32));
        GluedArrow {
            r: self.r + k,
            s: self.s + k,
            components: self.components.iter().map(|c| c.kron(&id)).collect(),
        }
    }
    fn pad_left(&self, d: usize) -> Self {
        GluedArrow {
            r: self.r + 1,
            s: self.s + 1,
            components: self.components.iter().map(|c| c.pad_left(d)).collect(),
        }
    }
    fn scale(&self, z: Cx) -> Self {
        GluedArrow::scale(self, z)
    }
    fn add(&self, other: &Self) -> Self {
        GluedArrow::add(self, other).expect("same space")
    }
    fn distance(&self, other: &Self) -> f64 {
        GluedArrow::distance(self, other)
    }
    fn frobenius(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }
    fn strip_right(&self, d: usize, tol: Tolerance) -> Option<Self> {
        let components = self
            .components
            .iter()
            .map(|c| strip_matrix(c, d, tol))
            .collect::<Option<Vec<_>>>()?;
        Some(GluedArrow {
            r: self.r - 1,
            s: self.s - 1,
            components,
        })
    }
    fn gauge(&self, g: &ComplexMatrix, r: usize, s: usize) -> Self {
        GluedArrow {
            r: self.r,
            s: self.s,
            components: self.components.iter().map(|c| c.gauge(g, r, s)).collect(),
        }
    }
    fn shape_matches(&self, d: usize, r: usize, s: usize) -> bool {
        self.r == r && self.s == s && self.components.iter().all(|c| c.shape_matches(d, r, s))
    }
}

/// Finite window onto the inductive limit: powers up to `max_power`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrWindow {
    pub d: usize,
    pub level: usize,
    pub max_power: usize,
    pub tolerance: Tolerance,
}

impl DrWindow {
    /// Window for level `N` with room for grades up to `max_grade`.
    pub fn new(d: usize, level: usize, max_grade: usize) -> Self {
        DrWindow {
            d,
            level,
            max_power: level + max_grade,
            tolerance: Tolerance::DEFAULT,
        }
    }

    fn check(&self, power: usize) -> Result<(), DrError> {
        if power > self.max_power {
            return Err(DrError::TruncationOverflow {
                power,
                max: self.max_power,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DrElement<A> {
    pub r: usize,
    pub s: usize,
    pub value: A,
}

impl<A: DrArrow> DrElement<A> {
    pub fn new(window: &DrWindow, r: usize, s: usize, value: A) -> Result<Self, DrError> {
        window.check(r.max(s))?;
        if !value.shape_matches(window.d, r, s) {
            return Err(DrError::Shape { r, s });
        }
        Ok(DrElement { r, s, value })
    }

    pub fn grade(&self) -> i64 {
        self.s as i64 - self.r as i64
    }

    pub fn adjoint(&self) -> Self {
        DrElement {
            r: self.s,
            s: self.r,
            value: self.value.adjoint(),
        }
    }

    pub fn scale(&self, z: Cx) -> Self {
        DrElement {
            r: self.r,
            s: self.s,
            value: self.value.scale(z),
        }
    }

    /// Representative at powers `(r + k, s + k)`.
    pub fn lift(&self, window: &DrWindow, k: usize) -> Result<Self, DrError> {
        window.check(self.r.max(self.s) + k)?;
        Ok(DrElement {
            r: self.r + k,
            s: self.s + k,
            value: self.value.pad_right(window.d, k),
        })
    }

    /// Strips trailing identity factors while `t = t₀ ⊗ 1` holds.
    pub fn normalize(&self, window: &DrWindow) -> Self {
        let mut cur = self.clone();
        while cur.r > 0 && cur.s > 0 {
            match cur.value.strip_right(window.d, window.tolerance) {
                Some(v) => {
                    cur = DrElement {
                        r: cur.r - 1,
                        s: cur.s - 1,
                        value: v,
                    }
                }
                None => break,
            }
        }
        cur
    }

    /// Sum in the inductive limit: both lifted to a common level.
    pub fn add(&self, other: &Self, window: &DrWindow) -> Result<Self, DrError> {
        assert_eq!(self.grade(), other.grade(), "sum of elements of different grades");
        let k = self.r.max(other.r);
        let a = self.lift(window, k - self.r)?;
        let b = other.lift(window, k - other.r)?;
        Ok(DrElement {
            r: a.r,
            s: a.s,
            value: a.value.add(&b.value),
        })
    }

    /// Distance after lifting both to a common level.
    pub fn distance(&self, other: &Self, window: &DrWindow) -> Result<f64, DrError> {
        if self.grade() != other.grade() {
            return Ok(f64::INFINITY);
        }
        let k = self.r.max(other.r);
        let a = self.lift(window, k - self.r)?;
        let b = other.lift(window, k - other.r)?;
        Ok(a.value.distance(&b.value))
    }
}

/// The unit `(0, 0, 1)`.
pub fn dr_unit(window: &DrWindow) -> DrElement<ComplexMatrix> {
    DrElement {
        r: 0,
        s: 0,
        value: ComplexMatrix::identity(1),
    }
    .normalize(window)
}

/// `a·b`: pad to composable powers, compose, normalize.
pub fn dr_mul<A: DrArrow>(a: &DrElement<A>, b: &DrElement<A>, window: &DrWindow) -> Result<DrElement<A>, DrError> {
    let (a, b) = if b.s < a.r {
        (a.clone(), b.lift(window, a.r - b.s)?)
    } else {
        (a.lift(window, b.s - a.r)?, b.clone())
    };
    Ok(DrElement {
        r: b.r,
        s: a.s,
        value: a.value.compose(&b.value),
    }
    .normalize(window))
}

/// `ρ_*(t) = 1 ⊗ t`.
pub fn canonical_endo<A: DrArrow>(a: &DrElement<A>, window: &DrWindow) -> Result<DrElement<A>, DrError> {
    window.check(a.r.max(a.s) + 1)?;
    Ok(DrElement {
        r: a.r + 1,
        s: a.s + 1,
        value: a.value.pad_left(window.d),
    })
}

/// `ẑ(t) = z^{s−r} t`.
pub fn circle_action<A: DrArrow>(z: Cx, a: &DrElement<A>) -> Result<DrElement<A>, DrError> {
    if (z.norm() - 1.0).abs() > 1e-9 {
        return Err(DrError::NotUnitScalar(z.norm()));
    }
    let k = a.grade();
    let factor = if k >= 0 { z.powi(k as i32) } else { z.conj().powi((-k) as i32) };
    Ok(a.scale(factor))
}

/// `ĝ(t) = g^{⊗s} t (g^{⊗r})*`.
pub fn gauge_action<A: DrArrow>(g: &ComplexMatrix, a: &DrElement<A>) -> DrElement<A> {
    DrElement {
        r: a.r,
        s: a.s,
        value: a.value.gauge(g, a.r, a.s),
    }
}

/// `‖1⊗t − θ(s,1)(t⊗1)θ(1,r)‖` for `t ∈ (r, s)`.
pub fn rhoeps_residual(t: &ComplexMatrix, r: usize, s: usize, d: usize) -> f64 {
    let lhs = ComplexMatrix::identity(d).kron(t);
    let rhs = &(&block_swap(s, 1, d) * &t.kron(&ComplexMatrix::identity(d))) * &block_swap(1, r, d);
    lhs.distance(&rhs)
}

/// Basis of the gauge-fixed subspace of `(H^r, H^s)`.
///
/// Computed without the constraint solver: the fixed space is the
/// eigenvalue-one eigenspace of a Hermitian averaging operator on
/// `vec(T)`. For finite groups this is the group average itself; for the
/// continuous families it is the mean of `Re ĝ_k` over `g_k = exp(X_k)`,
/// `X_k` running through the Lie basis.
pub fn fixed_points(group: &GroupSpec, r: usize, s: usize) -> Result<Vec<ComplexMatrix>, DrError> {
    let d = group.degree();
    let (rows, cols) = (d.pow(s as u32), d.pow(r as u32));
    let n = rows * cols;
    // vec(A T B) = (A ⊗ Bᵀ) vec(T); here B = (g^{⊗r})*, so Bᵀ = conj(g^{⊗r}).
    let gauge_operator = |g: &ComplexMatrix| tensor_power(g, s).kron(&tensor_power(g, r).conjugate());
    let averaging = match group.kind() {
        GroupKind::FiniteMatrix => {
            let elements = group.elements()?;
            let mut sum = ComplexMatrix::zeros(n, n);
            for g in elements {
                sum = &sum + &gauge_operator(g);
            }
            sum.scale_real(1.0 / elements.len() as f64)
        }
        GroupKind::SpecialUnitary | GroupKind::FullUnitary => {
            let lie = lie_basis(group)?;
            let mut sum = ComplexMatrix::zeros(n, n);
            for x in &lie.matrices {
                let u = gauge_operator(&x.exp());
                sum = &sum + &(&u + &u.adjoint()).scale_real(0.5);
            }
            sum.scale_real(1.0 / lie.matrices.len() as f64)
        }
    };
    let (values, vectors) = averaging.hermitian_eigen();
    let fixed: Vec<ComplexMatrix> = values
        .iter()
        .zip(vectors)
        .filter(|(&lambda, _)| lambda > 1.0 - 1e-6)
        .map(|(_, v)| ComplexMatrix::unvec(rows, cols, &v))
        .collect();
    Ok(span_basis(&fixed, group.tolerance()))
}

/// `ν(a) = Σ_l ψ_l · a · ψ_l*`.
pub fn inner_endo_nu<A: DrArrow>(
    vbasis: &[DrElement<A>],
    a: &DrElement<A>,
    window: &DrWindow,
) -> Result<DrElement<A>, DrError> {
    let mut total: Option<DrElement<A>> = None;
    for psi in vbasis {
        let term = dr_mul(&dr_mul(psi, a, window)?, &psi.adjoint(), window)?;
        total = Some(match total {
            None => term,
            Some(t) => t.add(&term, window)?,
        });
    }
    Ok(total.expect("nonempty V-module basis").normalize(window))
}

/// Outcome of comparing `û` and `v̂` on the intertwiner spaces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilizerReport {
    /// `û` and `v̂` agree on every basis element with `r, s ≤ N`.
    pub agree: bool,
    /// `uv* ∈ G`.
    pub in_group: bool,
    /// First basis element where the actions differ: `(r, s, index, residual)`.
    pub witness: Option<(usize, usize, usize, f64)>,
}

impl StabilizerReport {
    pub fn consistent(&self) -> bool {
        self.agree == self.in_group
    }
}

pub fn stabilizer_test(
    u: &ComplexMatrix,
    v: &ComplexMatrix,
    group: &GroupSpec,
    level: usize,
) -> Result<StabilizerReport, DrError> {
    verify_normalizer(u, group)?;
    verify_normalizer(v, group)?;
    let tol = group.tolerance();
    let mut witness = None;
    'outer: for r in 0..=level {
        for s in 0..=level {
            let space = intertwiners(group, r, s)?;
            for (k, t) in space.basis.iter().enumerate() {
                let diff = hat_action(u, t, r, s)?.distance(&hat_action(v, t, r, s)?);
                if diff > tol.value() * 100.0 {
                    witness = Some((r, s, k, diff));
                    break 'outer;
                }
            }
        }
    }
    let uv = u * &v.adjoint();
    let in_group = match group.kind() {
        GroupKind::FiniteMatrix => find_element(group.elements()?, &uv, tol).is_some(),
        _ => group.contains(&uv)?,
    };
    Ok(StabilizerReport {
        agree: witness.is_none(),
        in_group,
        witness,
    })
}

/// Scalar `(0, 0, z)`.
pub fn dr_scalar(z: Cx) -> DrElement<ComplexMatrix> {
    DrElement {
        r: 0,
        s: 0,
        value: ComplexMatrix::scalar(z),
    }
}

/// The unit of the glued algebra, `(0, 0, 1)` on every patch.
pub fn glued_unit(patches: usize) -> DrElement<GluedArrow> {
    DrElement {
        r: 0,
        s: 0,
        value: GluedArrow::constant(0, 0, ComplexMatrix::identity(1), patches),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::catalog;
    use crate::linalg::{cx, projection_residual};
    use crate::repcat::{antisym_projector, special_isometry};

    fn w2() -> DrWindow {
        DrWindow::new(2, 3, 3)
    }

    fn el(r: usize, s: usize, f: impl FnMut(usize, usize) -> Cx) -> DrElement<ComplexMatrix> {
        DrElement::new(&w2(), r, s, ComplexMatrix::from_fn(2usize.pow(s as u32), 2usize.pow(r as u32), f)).unwrap()
    }

    #[test]
    fn unit_and_isometry() {
        let w = w2();
        let a = el(1, 2, |i, j| cx(i as f64 + 1.0, j as f64 - 0.5));
        let prod = dr_mul(&a, &dr_unit(&w), &w).unwrap();
        assert_eq!((prod.r, prod.s), (1, 2));
        assert!(prod.value.distance(&a.value) < 1e-15);
        let s = DrElement::new(&w, 0, 2, special_isometry(2).unwrap().s).unwrap();
        let ss = dr_mul(&s.adjoint(), &s, &w).unwrap();
        assert_eq!((ss.r, ss.s), (0, 0));
        assert!((ss.value.get(0, 0) - cx(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn identity_normalizes_to_unit() {
        let w = w2();
        let e = canonical_endo(&dr_unit(&w), &w).unwrap();
        assert_eq!((e.r, e.s), (1, 1));
        let n = e.normalize(&w);
        assert_eq!((n.r, n.s), (0, 0));
    }

    #[test]
    fn window_enforced() {
        let w = DrWindow::new(2, 1, 1);
        let a = el(0, 2, |_, _| cx(1.0, 0.0));
        assert!(matches!(canonical_endo(&a, &w), Err(DrError::TruncationOverflow { .. })));
    }

    #[test]
    fn circle_grading() {
        let a = el(0, 2, |i, _| cx(i as f64, 1.0));
        let b = circle_action(cx(0.0, 1.0), &a).unwrap();
        assert!(b.value.distance(&a.value.scale_real(-1.0)) < 1e-15);
        assert!(circle_action(cx(2.0, 0.0), &a).is_err());
        let c = el(1, 1, |i, j| cx((i + j) as f64, 0.0));
        assert_eq!(circle_action(crate::linalg::turns(0.3), &c).unwrap(), c);
    }

    #[test]
    fn rhoeps_on_intertwiners() {
        let g = GroupSpec::special_unitary(2);
        for r in 0..=3 {
            for s in 0..=3 {
                for t in intertwiners(&g, r, s).unwrap().basis {
                    assert!(rhoeps_residual(&t, r, s, 2) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn fixed_points_match_intertwiners() {
        for g in [GroupSpec::trivial(2), catalog::quaternion(), GroupSpec::special_unitary(2)] {
            for (r, s) in [(1, 1), (2, 2), (0, 2), (1, 2)] {
                let fp = fixed_points(&g, r, s).unwrap();
                let it = intertwiners(&g, r, s).unwrap();
                assert_eq!(fp.len(), it.dim());
                for b in &fp {
                    assert!(projection_residual(b, &it.basis) < 1e-9);
                }
            }
        }
        assert_eq!(fixed_points(&GroupSpec::special_unitary(2), 2, 2).unwrap().len(), 2);
        assert_eq!(fixed_points(&GroupSpec::trivial(2), 1, 1).unwrap().len(), 4);
    }

    #[test]
    fn nu_of_unit_is_projector() {
        let w = w2();
        let s = DrElement::new(&w, 0, 2, special_isometry(2).unwrap().s).unwrap();
        let nu = inner_endo_nu(&[s], &dr_unit(&w), &w).unwrap();
        assert_eq!((nu.r, nu.s), (2, 2));
        assert!(nu.value.distance(&antisym_projector(2, 2).unwrap()) < 1e-15);
    }

    #[test]
    fn stabilizer_examples() {
        let q8 = catalog::quaternion();
        let i = ComplexMatrix::identity(2);
        let g = catalog::quaternion_matrix(0.0, 0.0, 1.0, 0.0);
        assert!(stabilizer_test(&i, &i, &q8, 2).unwrap().agree);
        let rep = stabilizer_test(&g, &i, &q8, 2).unwrap();
        assert!(rep.agree && rep.in_group);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = catalog::quaternion_matrix(s, s, 0.0, 0.0);
        let rep = stabilizer_test(&h, &i, &q8, 3).unwrap();
        assert!(!rep.agree && !rep.in_group);
        assert!(rep.witness.is_some());
    }
}
