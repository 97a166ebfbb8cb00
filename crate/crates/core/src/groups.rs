//! Compact matrix groups `G ⊆ U(d)`.
//!
//! Finite groups are given by unitary generators and enumerated on demand;
//! `SU(d)` and `U(d)` are never sampled and instead expose a Lie-algebra
//! basis. Normalizer elements `u ∈ NG` are supplied by the caller and
//! verified, never searched for.

use std::collections::VecDeque;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{cx, ComplexMatrix, Cx, Tolerance};

pub const DEFAULT_ENUMERATION_CAP: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("group closure exceeded the enumeration cap of {cap} elements")]
    CapExceeded { cap: usize },
    #[error("generator {index} is not unitary (defect {defect:.3e})")]
    NotUnitary { index: usize, defect: f64 },
    #[error("operation requires a {expected} group")]
    WrongKind { expected: &'static str },
    #[error("matrix of size {got} does not match group degree {degree}")]
    DegreeMismatch { degree: usize, got: usize },
    #[error("conjugating generator {generator} by u leaves the group")]
    NotInNormalizer { generator: usize },
    #[error("matrix is not unitary (defect {defect:.3e})")]
    MatrixNotUnitary { defect: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupKind {
    #[serde(rename = "finite")]
    FiniteMatrix,
    #[serde(rename = "su")]
    SpecialUnitary,
    #[serde(rename = "u")]
    FullUnitary,
}

/// A closed subgroup of `U(d)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "GroupSpecJson", into = "GroupSpecJson")]
pub struct GroupSpec {
    kind: GroupKind,
    degree: usize,
    generators: Vec<ComplexMatrix>,
    enumeration_cap: usize,
    tolerance: Tolerance,
    elements: OnceLock<Result<Vec<ComplexMatrix>, GroupError>>,
}

impl PartialEq for GroupSpec {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.degree == other.degree
            && self.generators == other.generators
            && self.enumeration_cap == other.enumeration_cap
    }
}

#[derive(Serialize, Deserialize)]
struct GroupSpecJson {
    kind: GroupKind,
    degree: usize,
    #[serde(default)]
    generators: Vec<ComplexMatrix>,
}

impl TryFrom<GroupSpecJson> for GroupSpec {
    type Error = GroupError;
    fn try_from(raw: GroupSpecJson) -> Result<Self, GroupError> {
        match raw.kind {
            GroupKind::FiniteMatrix => GroupSpec::finite(raw.degree, raw.generators),
            GroupKind::SpecialUnitary => Ok(GroupSpec::special_unitary(raw.degree)),
            GroupKind::FullUnitary => Ok(GroupSpec::full_unitary(raw.degree)),
        }
    }
}

impl From<GroupSpec> for GroupSpecJson {
    fn from(g: GroupSpec) -> Self {
        GroupSpecJson {
            kind: g.kind,
            degree: g.degree,
            generators: g.generators,
        }
    }
}

impl GroupSpec {
    /// Finite group generated by the given unitaries.
    pub fn finite(degree: usize, generators: Vec<ComplexMatrix>) -> Result<Self, GroupError> {
        let tol = Tolerance::DEFAULT;
        for (index, g) in generators.iter().enumerate() {
            if g.shape() != (degree, degree) {
                return Err(GroupError::DegreeMismatch {
                    degree,
                    got: g.rows(),
                });
            }
            let defect = g.unitarity_defect().unwrap_or(f64::INFINITY);
            if defect > tol.value() {
                return Err(GroupError::NotUnitary { index, defect });
            }
        }
        Ok(Self::build(GroupKind::FiniteMatrix, degree, generators))
    }

    pub fn special_unitary(degree: usize) -> Self {
        Self::build(GroupKind::SpecialUnitary, degree, Vec::new())
    }

    pub fn full_unitary(degree: usize) -> Self {
        Self::build(GroupKind::FullUnitary, degree, Vec::new())
    }

    /// The trivial subgroup `{1} ⊆ U(d)`.
    pub fn trivial(degree: usize) -> Self {
        Self::build(GroupKind::FiniteMatrix, degree, Vec::new())
    }

    fn build(kind: GroupKind, degree: usize, generators: Vec<ComplexMatrix>) -> Self {
        GroupSpec {
            kind,
            degree,
            generators,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            tolerance: Tolerance::DEFAULT,
            elements: OnceLock::new(),
        }
    }

    pub fn with_enumeration_cap(mut self, cap: usize) -> Self {
        self.enumeration_cap = cap;
        self.elements = OnceLock::new();
        self
    }

    pub fn with_tolerance(mut self, tol: Tolerance) -> Self {
        self.tolerance = tol;
        self.elements = OnceLock::new();
        self
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    pub fn enumeration_cap(&self) -> usize {
        self.enumeration_cap
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tolerance
    }

    pub fn is_finite(&self) -> bool {
        self.kind == GroupKind::FiniteMatrix
    }

    /// Whether every element has determinant one.
    pub fn is_inside_special_unitary(&self) -> Result<bool, GroupError> {
        match self.kind {
            GroupKind::SpecialUnitary => Ok(true),
            GroupKind::FullUnitary => Ok(false),
            GroupKind::FiniteMatrix => Ok(self
                .generators
                .iter()
                .all(|g| (g.determinant() - cx(1.0, 0.0)).norm() <= self.tolerance.value() * 10.0)),
        }
    }

    /// All elements of a finite group, in discovery order (identity first).
    pub fn elements(&self) -> Result<&[ComplexMatrix], GroupError> {
        if !self.is_finite() {
            return Err(GroupError::WrongKind { expected: "finite" });
        }
        self.elements
            .get_or_init(|| {
                enumerate_generated(&self.generators, self.degree, self.enumeration_cap, self.tolerance)
            })
            .as_ref()
            .map(|v| v.as_slice())
            .map_err(Clone::clone)
    }

    /// Order of a finite group.
    pub fn order(&self) -> Result<usize, GroupError> {
        self.elements().map(<[_]>::len)
    }

    /// Membership test: enumerated lookup for finite groups, unitarity and
    /// determinant checks for the continuous families.
    pub fn contains(&self, m: &ComplexMatrix) -> Result<bool, GroupError> {
        if m.shape() != (self.degree, self.degree) {
            return Err(GroupError::DegreeMismatch {
                degree: self.degree,
                got: m.rows(),
            });
        }
        let tol = self.tolerance;
        match self.kind {
            GroupKind::FiniteMatrix => Ok(find_element(self.elements()?, m, tol).is_some()),
            GroupKind::SpecialUnitary => {
                Ok(m.is_unitary(tol_scaled(tol, 10.0))
                    && (m.determinant() - cx(1.0, 0.0)).norm() <= tol.value() * 10.0)
            }
            GroupKind::FullUnitary => Ok(m.is_unitary(tol_scaled(tol, 10.0))),
        }
    }
}

fn tol_scaled(tol: Tolerance, factor: f64) -> Tolerance {
    Tolerance::new(tol.value() * factor).expect("positive tolerance")
}

/// Index of the element within Frobenius distance `tol·max(1, ‖m‖)`.
pub fn find_element(elements: &[ComplexMatrix], m: &ComplexMatrix, tol: Tolerance) -> Option<usize> {
    let bound = tol.value() * m.frobenius_norm().max(1.0);
    elements.iter().position(|e| e.distance(m) <= bound)
}

/// Enumerates the group generated by unitary `generators` by breadth-first
/// closure under right multiplication. Products drifting from unitarity by
/// more than `tol/10` are snapped back to their polar factor.
pub fn enumerate_generated(
    generators: &[ComplexMatrix],
    degree: usize,
    cap: usize,
    tol: Tolerance,
) -> Result<Vec<ComplexMatrix>, GroupError> {
    for (index, g) in generators.iter().enumerate() {
        if g.shape() != (degree, degree) {
            return Err(GroupError::DegreeMismatch {
                degree,
                got: g.rows(),
            });
        }
        let defect = g.unitarity_defect().unwrap_or(f64::INFINITY);
        if defect > tol.value() {
            return Err(GroupError::NotUnitary { index, defect });
        }
    }
    let mut elements = vec![ComplexMatrix::identity(degree)];
    let mut queue = VecDeque::from([0usize]);
    while let Some(at) = queue.pop_front() {
        for g in generators {
            let mut y = &elements[at] * g;
            if y.unitarity_defect().unwrap_or(0.0) > tol.value() / 10.0 {
                y = y.polar_unitary();
            }
            if find_element(&elements, &y, tol).is_none() {
                if elements.len() >= cap {
                    return Err(GroupError::CapExceeded { cap });
                }
                elements.push(y);
                queue.push_back(elements.len() - 1);
            }
        }
    }
    Ok(elements)
}

/// Enumerates a finite group (`spec.kind` must be `FiniteMatrix`).
pub fn enumerate_finite(spec: &GroupSpec) -> Result<Vec<ComplexMatrix>, GroupError> {
    spec.elements().map(<[_]>::to_vec)
}

/// Anti-Hermitian basis of `su(d)` or `u(d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LieBasis {
    pub degree: usize,
    pub matrices: Vec<ComplexMatrix>,
}

impl LieBasis {
    /// Indices of basis elements that are diagonal (the Cartan part).
    pub fn diagonal_indices(&self) -> Vec<usize> {
        self.matrices
            .iter()
            .enumerate()
            .filter(|(_, m)| {
                (0..m.rows()).all(|i| (0..m.cols()).all(|j| i == j || m.get(i, j).norm() == 0.0))
            })
            .map(|(k, _)| k)
            .collect()
    }
}

/// Standard basis: `E_jk − E_kj` and `i(E_jk + E_kj)` for `j < k`, the
/// traceless diagonals `i(E_jj − E_{j+1,j+1})`, plus `i·I` for `U(d)`.
pub fn lie_basis(spec: &GroupSpec) -> Result<LieBasis, GroupError> {
    let d = spec.degree;
    let unit = |j: usize, k: usize| {
        ComplexMatrix::from_fn(d, d, |a, b| if a == j && b == k { cx(1.0, 0.0) } else { cx(0.0, 0.0) })
    };
    let i = cx(0.0, 1.0);
    let mut matrices = Vec::new();
    match spec.kind {
        GroupKind::FiniteMatrix => return Err(GroupError::WrongKind { expected: "continuous" }),
        GroupKind::SpecialUnitary | GroupKind::FullUnitary => {
            for j in 0..d {
                for k in j + 1..d {
                    matrices.push(&unit(j, k) - &unit(k, j));
                    matrices.push((&unit(j, k) + &unit(k, j)).scale(i));
                }
            }
            for j in 0..d.saturating_sub(1) {
                matrices.push((&unit(j, j) - &unit(j + 1, j + 1)).scale(i));
            }
            if spec.kind == GroupKind::FullUnitary {
                matrices.push(ComplexMatrix::identity(d).scale(i));
            }
        }
    }
    Ok(LieBasis { degree: d, matrices })
}

/// An element of the normalizer `NG` of a group in `U(d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizerElement {
    u: ComplexMatrix,
    phase_det: Cx,
}

impl NormalizerElement {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.u
    }

    /// `det(u)`, the image of `u` under `det_Q` when `G ⊆ SU(d)`.
    pub fn phase_det(&self) -> Cx {
        self.phase_det
    }
}

/// Checks `u g u* ∈ G` for every generator of `G`.
pub fn verify_normalizer(u: &ComplexMatrix, group: &GroupSpec) -> Result<NormalizerElement, GroupError> {
    let d = group.degree();
    if u.shape() != (d, d) {
        return Err(GroupError::DegreeMismatch { degree: d, got: u.rows() });
    }
    let defect = u.unitarity_defect().unwrap_or(f64::INFINITY);
    if defect > group.tolerance().value() * 10.0 {
        return Err(GroupError::MatrixNotUnitary { defect });
    }
    if group.is_finite() {
        let u_adj = u.adjoint();
        for (index, g) in group.generators().iter().enumerate() {
            let conj = &(u * g) * &u_adj;
            if !group.contains(&conj)? {
                return Err(GroupError::NotInNormalizer { generator: index });
            }
        }
    }
    // Every unitary normalizes SU(d) and U(d).
    Ok(NormalizerElement {
        u: u.clone(),
        phase_det: u.determinant(),
    })
}

/// Named finite subgroups of `SU(2)` used across the crate and its tests.
pub mod catalog {
    use super::*;

    /// `a + b·i + c·j + d·k ↦ [[a+bi, c+di], [−c+di, a−bi]]`.
    pub fn quaternion_matrix(a: f64, b: f64, c: f64, d: f64) -> ComplexMatrix {
        ComplexMatrix::from_row_major(2, 2, &[cx(a, b), cx(c, d), cx(-c, d), cx(a, -b)])
            .expect("2x2")
    }

    /// Cyclic group of order 4 generated by `diag(i, −i)`.
    pub fn cyclic4_diagonal() -> GroupSpec {
        GroupSpec::finite(2, vec![ComplexMatrix::diag(&[cx(0.0, 1.0), cx(0.0, -1.0)])]).expect("unitary")
    }

    /// Quaternion group `Q8`, generated by `[[i,0],[0,−i]]` and `[[0,1],[−1,0]]`.
    pub fn quaternion() -> GroupSpec {
        GroupSpec::finite(
            2,
            vec![quaternion_matrix(0.0, 1.0, 0.0, 0.0), quaternion_matrix(0.0, 0.0, 1.0, 0.0)],
        )
        .expect("unitary")
    }

    /// Binary octahedral group (order 48), the normalizer of `Q8` in `SU(2)`.
    pub fn binary_octahedral() -> GroupSpec {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        GroupSpec::finite(
            2,
            vec![
                quaternion_matrix(0.5, 0.5, 0.5, 0.5),
                quaternion_matrix(s, s, 0.0, 0.0),
                quaternion_matrix(0.0, 0.0, 1.0, 0.0),
            ],
        )
        .expect("unitary")
    }

    /// Binary icosahedral group (order 120).
    pub fn binary_icosahedral() -> GroupSpec {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        GroupSpec::finite(
            2,
            vec![
                quaternion_matrix(0.5, 0.5, 0.5, 0.5),
                quaternion_matrix(phi / 2.0, 0.5 / phi, 0.5, 0.0),
            ],
        )
        .expect("unitary")
    }
}
