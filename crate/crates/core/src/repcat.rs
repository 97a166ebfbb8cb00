//! The fibre category: tensor powers `H^r` of the defining representation
//! of `G ⊆ U(d)` and the intertwiner spaces `(H^r, H^s)_G` between them.
//!
//! Matrices act on `H^r = (ℂ^d)^{⊗r}` with multi-indices in row-major
//! order, so the first tensor factor is the most significant digit.

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groups::{lie_basis, GroupError, GroupKind, GroupSpec};
use crate::linalg::{cx, nullspace_stacked, projection_residual, span_basis, ComplexMatrix, Cx};

/// Default bound on `d^r · d^s`, the number of unknowns in a constraint solve.
pub const DEFAULT_SIZE_CAP: usize = 10_000;

/// Largest `r` for which the antisymmetric projector sums over `P_r`.
pub const FACTORIAL_CAP: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RepcatError {
    #[error("intertwiner problem has {unknowns} unknowns, above the cap of {cap}")]
    SizeCapExceeded { unknowns: usize, cap: usize },
    #[error("sum over P_{r} exceeds the factorial cap r <= {cap}")]
    FactorialCap { r: usize, cap: usize },
    #[error("expected a {expected_rows}x{expected_cols} matrix, got {rows}x{cols}")]
    ShapeMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("invalid permutation {0:?}")]
    BadPermutation(Vec<usize>),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// `(H^r, H^s)_G` with a Hilbert–Schmidt orthonormal basis of `d^s × d^r`
/// matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntertwinerSpace {
    pub group: GroupSpec,
    pub r: usize,
    pub s: usize,
    pub basis: Vec<ComplexMatrix>,
}

impl IntertwinerSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Hilbert–Schmidt distance of `t` from the space.
    pub fn distance_to(&self, t: &ComplexMatrix) -> f64 {
        projection_residual(t, &self.basis)
    }

    /// Orthogonal projection of `t` onto the space.
    pub fn project(&self, t: &ComplexMatrix) -> ComplexMatrix {
        let d = self.group.degree();
        let mut out = ComplexMatrix::zeros(d.pow(self.s as u32), d.pow(self.r as u32));
        for b in &self.basis {
            out = &out + &b.scale(b.hs_inner(t));
        }
        out
    }

    /// Linear combination `Σ c_k B_k` of the basis.
    pub fn combine(&self, coeffs: &[Cx]) -> ComplexMatrix {
        assert_eq!(coeffs.len(), self.dim(), "coefficient count");
        let d = self.group.degree();
        let mut out = ComplexMatrix::zeros(d.pow(self.s as u32), d.pow(self.r as u32));
        for (c, b) in coeffs.iter().zip(&self.basis) {
            out = &out + &b.scale(*c);
        }
        out
    }
}

/// `g^{⊗n}` as a `d^n × d^n` matrix; `n = 0` gives `[1]`.
pub fn tensor_power(g: &ComplexMatrix, n: usize) -> ComplexMatrix {
    g.kron_pow(n)
}

/// `dπ_n(X) = Σ_k 1 ⊗ … ⊗ X ⊗ … ⊗ 1` (X in slot k).
pub fn derived_power(x: &ComplexMatrix, n: usize) -> ComplexMatrix {
    let d = x.rows();
    let mut out = ComplexMatrix::zeros(d.pow(n as u32), d.pow(n as u32));
    for k in 0..n {
        let left = ComplexMatrix::identity(d.pow(k as u32));
        let right = ComplexMatrix::identity(d.pow((n - k - 1) as u32));
        out = &out + &left.kron(x).kron(&right);
    }
    out
}

/// Constraint matrix of `T ↦ A T − T B` on row-major `vec(T)`.
fn sylvester_operator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let left = a.kron(&ComplexMatrix::identity(b.rows()));
    let right = ComplexMatrix::identity(a.rows()).kron(&b.transpose());
    &left - &right
}

/// The generator-level constraint pairs `(A, B)` with `A T = T B`: tensor
/// powers of the generators for finite groups, derived representations of
/// the Lie basis (diagonal elements first) for `SU(d)` and `U(d)`.
pub fn constraint_pairs(
    group: &GroupSpec,
    r: usize,
    s: usize,
) -> Result<Vec<(ComplexMatrix, ComplexMatrix)>, RepcatError> {
    match group.kind() {
        GroupKind::FiniteMatrix => Ok(group
            .generators()
            .iter()
            .map(|g| (tensor_power(g, s), tensor_power(g, r)))
            .collect()),
        GroupKind::SpecialUnitary | GroupKind::FullUnitary => {
            let lie = lie_basis(group)?;
            let diag = lie.diagonal_indices();
            let order = diag
                .iter()
                .copied()
                .chain((0..lie.matrices.len()).filter(|k| !diag.contains(k)));
            Ok(order
                .map(|k| {
                    let x = &lie.matrices[k];
                    (derived_power(x, s), derived_power(x, r))
                })
                .collect())
        }
    }
}

/// Orthonormal basis of `(H^r, H^s)_G` with the default size cap.
pub fn intertwiners(group: &GroupSpec, r: usize, s: usize) -> Result<IntertwinerSpace, RepcatError> {
    intertwiners_capped(group, r, s, DEFAULT_SIZE_CAP)
}

pub fn intertwiners_capped(
    group: &GroupSpec,
    r: usize,
    s: usize,
    cap: usize,
) -> Result<IntertwinerSpace, RepcatError> {
    let d = group.degree();
    let (rows, cols) = (d.pow(s as u32), d.pow(r as u32));
    let unknowns = rows * cols;
    if unknowns > cap {
        return Err(RepcatError::SizeCapExceeded { unknowns, cap });
    }
    let blocks: Vec<ComplexMatrix> = constraint_pairs(group, r, s)?
        .iter()
        .map(|(a, b)| sylvester_operator(a, b))
        .collect();
    let basis = nullspace_stacked(&blocks, unknowns, group.tolerance())
        .into_iter()
        .map(|v| ComplexMatrix::unvec(rows, cols, &v))
        .collect();
    Ok(IntertwinerSpace {
        group: group.clone(),
        r,
        s,
        basis,
    })
}

/// Largest residual `‖A T − T B‖` over the constraint pairs of `group`.
pub fn intertwiner_residual(group: &GroupSpec, t: &ComplexMatrix, r: usize, s: usize) -> Result<f64, RepcatError> {
    check_shape(t, group.degree(), r, s)?;
    Ok(constraint_pairs(group, r, s)?
        .iter()
        .map(|(a, b)| (&(a * t) - &(t * b)).frobenius_norm())
        .fold(0.0, f64::max))
}

fn check_shape(t: &ComplexMatrix, d: usize, r: usize, s: usize) -> Result<(), RepcatError> {
    let (er, ec) = (d.pow(s as u32), d.pow(r as u32));
    if t.shape() != (er, ec) {
        return Err(RepcatError::ShapeMismatch {
            expected_rows: er,
            expected_cols: ec,
            rows: t.rows(),
            cols: t.cols(),
        });
    }
    Ok(())
}

/// `E(T) = |G|⁻¹ Σ_g g^{⊗s} T (g^{⊗r})*` for a finite group.
pub fn group_average(group: &GroupSpec, t: &ComplexMatrix, r: usize, s: usize) -> Result<ComplexMatrix, RepcatError> {
    check_shape(t, group.degree(), r, s)?;
    let elements = group.elements()?;
    let mut sum = ComplexMatrix::zeros(t.rows(), t.cols());
    for g in elements {
        sum = &sum + &(&(&tensor_power(g, s) * t) * &tensor_power(g, r).adjoint());
    }
    Ok(sum.scale_real(1.0 / elements.len() as f64))
}

/// `û(T) = u^{⊗s} T (u^{⊗r})*`.
pub fn hat_action(u: &ComplexMatrix, t: &ComplexMatrix, r: usize, s: usize) -> Result<ComplexMatrix, RepcatError> {
    check_shape(t, u.rows(), r, s)?;
    Ok(&(&tensor_power(u, s) * t) * &tensor_power(u, r).adjoint())
}

fn validate_permutation(p: &[usize]) -> Result<(), RepcatError> {
    let mut seen = vec![false; p.len()];
    for &x in p {
        if x >= p.len() || seen[x] {
            return Err(RepcatError::BadPermutation(p.to_vec()));
        }
        seen[x] = true;
    }
    Ok(())
}

/// Sign of a permutation given in one-line notation.
pub fn permutation_sign(p: &[usize]) -> i32 {
    let inversions = (0..p.len())
        .flat_map(|i| (i + 1..p.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| p[i] > p[j])
        .count();
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Composition `(p∘q)(k) = p(q(k))`.
pub fn compose_permutations(p: &[usize], q: &[usize]) -> Vec<usize> {
    q.iter().map(|&k| p[k]).collect()
}

/// Unitary on `(ℂ^d)^{⊗r}` moving tensor factor `k` to position `p[k]`.
/// Satisfies `U(p∘q) = U(p)U(q)`.
pub fn permutation_unitary(p: &[usize], d: usize) -> Result<ComplexMatrix, RepcatError> {
    validate_permutation(p)?;
    let r = p.len();
    let n = d.pow(r as u32);
    let mut out = ComplexMatrix::zeros(n, n);
    let mut digits = vec![0usize; r];
    let mut image = vec![0usize; r];
    let mut entries: Vec<Cx> = out.entries().collect();
    for col in 0..n {
        let mut rest = col;
        for k in (0..r).rev() {
            digits[k] = rest % d;
            rest /= d;
        }
        for k in 0..r {
            image[p[k]] = digits[k];
        }
        let row = image.iter().fold(0, |acc, &x| acc * d + x);
        entries[row * n + col] = cx(1.0, 0.0);
    }
    out = ComplexMatrix::from_row_major(n, n, &entries).expect("square");
    Ok(out)
}

/// `θ(r,s) : v ⊗ v′ ↦ v′ ⊗ v` for `v ∈ H^r`, `v′ ∈ H^s`.
pub fn block_swap(r: usize, s: usize, d: usize) -> ComplexMatrix {
    let p: Vec<usize> = (0..r).map(|k| s + k).chain(0..s).collect();
    permutation_unitary(&p, d).expect("valid block permutation")
}

/// All permutations of `r` letters in lexicographic order.
pub fn permutations(r: usize) -> Vec<Vec<usize>> {
    (0..r).permutations(r).collect()
}

/// `(1/r!) Σ_p sign(p) U(p)`, a projection of rank `binomial(d, r)`.
pub fn antisym_projector(d: usize, r: usize) -> Result<ComplexMatrix, RepcatError> {
    if r > FACTORIAL_CAP {
        return Err(RepcatError::FactorialCap { r, cap: FACTORIAL_CAP });
    }
    let n = d.pow(r as u32);
    let perms = permutations(r);
    let mut sum = ComplexMatrix::zeros(n, n);
    for p in &perms {
        let u = permutation_unitary(p, d)?;
        sum = &sum + &u.scale_real(permutation_sign(p) as f64);
    }
    Ok(sum.scale_real(1.0 / perms.len() as f64))
}

/// Totally antisymmetric isometry `S ∈ (ι, ρ^d)` with positive coefficient
/// on `e₁ ⊗ … ⊗ e_d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecialObjectData {
    pub d: usize,
    pub s: ComplexMatrix,
}

/// Residuals of the three special-object identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialResiduals {
    /// `‖S*S − 1‖`
    pub isometry: f64,
    /// `‖SS* − P_d‖`
    pub projector: f64,
    /// `‖(S*⊗1)(1⊗S) − (−1)^{d−1} d⁻¹ 1‖`
    pub contraction: f64,
}

impl SpecialResiduals {
    pub fn max(&self) -> f64 {
        self.isometry.max(self.projector).max(self.contraction)
    }
}

/// `(−1)^{d−1}/d`, the value of the special-object contraction.
pub fn contraction_constant(d: usize) -> f64 {
    let sign = if d % 2 == 1 { 1.0 } else { -1.0 };
    sign / d as f64
}

impl SpecialObjectData {
    pub fn projector(&self) -> Result<ComplexMatrix, RepcatError> {
        antisym_projector(self.d, self.d)
    }

    /// `(S*⊗1)(1⊗S)` as a `d × d` matrix.
    pub fn contraction(&self) -> ComplexMatrix {
        let id = ComplexMatrix::identity(self.d);
        &self.s.adjoint().kron(&id) * &id.kron(&self.s)
    }

    pub fn residuals(&self) -> Result<SpecialResiduals, RepcatError> {
        let d = self.d;
        let one = ComplexMatrix::identity(1);
        let isometry = (&(&self.s.adjoint() * &self.s) - &one).opnorm();
        let projector = (&(&self.s * &self.s.adjoint()) - &self.projector()?).opnorm();
        let target = ComplexMatrix::identity(d).scale_real(contraction_constant(d));
        let contraction = (&self.contraction() - &target).opnorm();
        Ok(SpecialResiduals {
            isometry,
            projector,
            contraction,
        })
    }
}

/// `S = (d!)^{-1/2} Σ_p sign(p) e_{p(1)} ⊗ … ⊗ e_{p(d)}`.
pub fn special_isometry(d: usize) -> Result<SpecialObjectData, RepcatError> {
    if d > FACTORIAL_CAP {
        return Err(RepcatError::FactorialCap { r: d, cap: FACTORIAL_CAP });
    }
    let n = d.pow(d as u32);
    let perms = permutations(d);
    let norm = (perms.len() as f64).sqrt();
    let mut entries = vec![cx(0.0, 0.0); n];
    for p in &perms {
        let index = p.iter().fold(0, |acc, &x| acc * d + x);
        entries[index] = cx(permutation_sign(p) as f64 / norm, 0.0);
    }
    Ok(SpecialObjectData {
        d,
        s: ComplexMatrix::column(&entries),
    })
}

/// Solutions `R ∈ (ι, ρ̄ρ)`, `R̄ ∈ (ι, ρρ̄)` of the conjugate equations for
/// the defining representation, with `ρ̄` acting by entrywise conjugates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugatePair {
    pub r: ComplexMatrix,
    pub rbar: ComplexMatrix,
    pub dim_value: f64,
}

impl ConjugatePair {
    fn degree(&self) -> usize {
        (self.r.rows() as f64).sqrt().round() as usize
    }

    /// `‖(R̄*⊗1)(1⊗R) − 1‖` and `‖(R*⊗1)(1⊗R̄) − 1‖`.
    pub fn equation_residuals(&self) -> (f64, f64) {
        let d = self.degree();
        let id = ComplexMatrix::identity(d);
        let first = &self.rbar.adjoint().kron(&id) * &id.kron(&self.r);
        let second = &self.r.adjoint().kron(&id) * &id.kron(&self.rbar);
        ((&first - &id).opnorm(), (&second - &id).opnorm())
    }

    /// `‖(ḡ⊗g)R − R‖`, zero for every unitary `g`.
    pub fn invariance_residual(&self, g: &ComplexMatrix) -> f64 {
        (&(&g.conjugate().kron(g) * &self.r) - &self.r).frobenius_norm()
    }
}

/// `R = R̄ = Σ_k e_k ⊗ e_k`, unnormalized so that `R*R = d`.
pub fn conjugate_pair(d: usize) -> ConjugatePair {
    let mut entries = vec![cx(0.0, 0.0); d * d];
    for k in 0..d {
        entries[k * d + k] = cx(1.0, 0.0);
    }
    let r = ComplexMatrix::column(&entries);
    let dim_value = (&r.adjoint() * &r).get(0, 0).re;
    ConjugatePair {
        rbar: r.clone(),
        r,
        dim_value,
    }
}

/// Orthonormal basis of `span{U(p) : p ∈ P_r}`.
pub fn permutation_span(d: usize, r: usize) -> Result<Vec<ComplexMatrix>, RepcatError> {
    let us = permutations(r)
        .iter()
        .map(|p| permutation_unitary(p, d))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(span_basis(&us, crate::linalg::Tolerance::DEFAULT))
}
