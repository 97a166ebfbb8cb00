//! Dense complex matrices at double precision.
//!
//! Every arrow, intertwiner and group element in the crate is a
//! [`ComplexMatrix`]. The type is immutable: all operations return new
//! values. Storage and the SVD are backed by `nalgebra`.
//!
//! Rank and nullspace decisions use a [`Tolerance`] relative to the largest
//! singular value of the matrix under consideration.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Complex scalar used throughout the crate.
pub type Cx = nalgebra::Complex<f64>;

/// Shorthand for a real number as a complex scalar.
pub fn cx(re: f64, im: f64) -> Cx {
    Cx::new(re, im)
}

/// `exp(2πi·turns)`.
pub fn turns(turns: f64) -> Cx {
    Cx::from_polar(1.0, std::f64::consts::TAU * turns)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShapeError {
    #[error("expected {expected} entries for a {rows}x{cols} matrix, got {got}")]
    EntryCount {
        rows: usize,
        cols: usize,
        expected: usize,
        got: usize,
    },
    #[error("real and imaginary parts differ in length ({re} vs {im})")]
    PartMismatch { re: usize, im: usize },
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
}

/// Relative threshold for rank, nullspace and equality decisions.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Tolerance(f64);

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance(1e-9);

    pub fn new(tau: f64) -> Result<Self, ShapeError> {
        if tau > 0.0 && tau.is_finite() {
            Ok(Tolerance(tau))
        } else {
            Err(ShapeError::BadTolerance(tau))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Dense complex matrix with row-major semantics.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    data: DMatrix<Cx>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self.get(i, j);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub(crate) fn from_nalgebra(data: DMatrix<Cx>) -> Self {
        Self { data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_nalgebra(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_nalgebra(DMatrix::identity(n, n))
    }

    /// The 1x1 matrix holding `z`.
    pub fn scalar(z: Cx) -> Self {
        Self::from_nalgebra(DMatrix::from_element(1, 1, z))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Cx) -> Self {
        Self::from_nalgebra(DMatrix::from_fn(rows, cols, f))
    }

    /// Builds a matrix from entries listed in row-major order.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[Cx]) -> Result<Self, ShapeError> {
        if entries.len() != rows * cols {
            return Err(ShapeError::EntryCount {
                rows,
                cols,
                expected: rows * cols,
                got: entries.len(),
            });
        }
        Ok(Self::from_fn(rows, cols, |i, j| entries[i * cols + j]))
    }

    /// Row-major real entries; panics on a length mismatch.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count");
        Self::from_fn(rows, cols, |i, j| cx(entries[i * cols + j], 0.0))
    }

    pub fn diag(entries: &[Cx]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i] } else { Cx::new(0.0, 0.0) })
    }

    /// Column vector.
    pub fn column(entries: &[Cx]) -> Self {
        Self::from_fn(entries.len(), 1, |i, _| entries[i])
    }

    /// Standard basis column `e_index` of length `n`.
    pub fn basis_vector(n: usize, index: usize) -> Self {
        Self::from_fn(n, 1, |i, _| if i == index { cx(1.0, 0.0) } else { cx(0.0, 0.0) })
    }

    /// Reshapes a column vector (row-major order) into a `rows x cols` matrix.
    pub fn unvec(rows: usize, cols: usize, v: &ComplexMatrix) -> Self {
        assert_eq!(v.rows() * v.cols(), rows * cols, "unvec size");
        let flat: Vec<Cx> = v.entries().collect();
        Self::from_fn(rows, cols, |i, j| flat[i * cols + j])
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows(), self.cols())
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> Cx {
        self.data[(i, j)]
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = Cx> + '_ {
        (0..self.rows()).flat_map(move |i| (0..self.cols()).map(move |j| self.data[(i, j)]))
    }

    /// Flattens to a column vector, row-major.
    pub fn vectorize(&self) -> ComplexMatrix {
        let flat: Vec<Cx> = self.entries().collect();
        Self::column(&flat)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_nalgebra(self.data.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self::from_nalgebra(self.data.transpose())
    }

    pub fn conjugate(&self) -> Self {
        Self::from_nalgebra(self.data.map(|z| z.conj()))
    }

    pub fn scale(&self, z: Cx) -> Self {
        Self::from_nalgebra(&self.data * z)
    }

    pub fn scale_real(&self, x: f64) -> Self {
        self.scale(cx(x, 0.0))
    }

    /// Kronecker product; `self` indexes the slow (leftmost) factor.
    pub fn kron(&self, other: &ComplexMatrix) -> Self {
        Self::from_nalgebra(self.data.kronecker(&other.data))
    }

    /// `n`-fold Kronecker power; the 0-th power is the 1x1 identity.
    pub fn kron_pow(&self, n: usize) -> Self {
        let mut acc = ComplexMatrix::identity(1);
        for _ in 0..n {
            acc = acc.kron(self);
        }
        acc
    }

    pub fn trace(&self) -> Cx {
        self.data.trace()
    }

    pub fn determinant(&self) -> Cx {
        self.data.determinant()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest singular value.
    pub fn opnorm(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        self.singular_values().into_iter().fold(0.0, f64::max)
    }

    pub fn singular_values(&self) -> Vec<f64> {
        if self.data.is_empty() {
            return Vec::new();
        }
        let svd = self.data.clone().svd(false, false);
        svd.singular_values.iter().copied().collect()
    }

    /// Frobenius distance.
    pub fn distance(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape(), "distance: shape mismatch");
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `‖A*A − I‖_op`; `None` for non-square matrices.
    pub fn unitarity_defect(&self) -> Option<f64> {
        if !self.is_square() {
            return None;
        }
        let gram = &self.adjoint() * self;
        Some((&gram - &ComplexMatrix::identity(self.rows())).opnorm())
    }

    pub fn is_unitary(&self, tol: Tolerance) -> bool {
        self.unitarity_defect().is_some_and(|e| e <= tol.value())
    }

    /// Closest unitary in Frobenius norm (polar factor `U V*`).
    pub fn polar_unitary(&self) -> ComplexMatrix {
        let svd = self.data.clone().svd(true, true);
        let u = svd.u.expect("svd u");
        let v_t = svd.v_t.expect("svd v_t");
        Self::from_nalgebra(u * v_t)
    }

    /// Matrix exponential of a square matrix.
    pub fn exp(&self) -> ComplexMatrix {
        Self::from_nalgebra(self.data.exp())
    }

    /// Eigenvalues and orthonormal eigenvectors (columns) of a Hermitian
    /// matrix. Only the lower triangle is read.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, Vec<ComplexMatrix>) {
        assert!(self.is_square(), "hermitian_eigen needs a square matrix");
        let n = self.rows();
        let eig = self.data.clone().symmetric_eigen();
        let vectors = (0..n)
            .map(|k| Self::from_nalgebra(DMatrix::from_column_slice(n, 1, eig.eigenvectors.column(k).as_slice())))
            .collect();
        (eig.eigenvalues.iter().copied().collect(), vectors)
    }

    /// Hilbert–Schmidt inner product `tr(A* B)`, conjugate-linear in `self`.
    pub fn hs_inner(&self, other: &ComplexMatrix) -> Cx {
        assert_eq!(self.shape(), other.shape(), "hs_inner: shape mismatch");
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Partial trace over the last tensor factor of dimension `d`, on both
    /// the row and column side. Requires `d` to divide both dimensions.
    pub fn partial_trace_last(&self, d: usize) -> ComplexMatrix {
        assert!(self.rows().is_multiple_of(d) && self.cols().is_multiple_of(d), "partial trace size");
        let (r, c) = (self.rows() / d, self.cols() / d);
        Self::from_fn(r, c, |i, j| (0..d).map(|k| self.data[(i * d + k, j * d + k)]).sum())
    }

    /// Column `j` as a column vector.
    pub fn column_at(&self, j: usize) -> ComplexMatrix {
        Self::from_nalgebra(DMatrix::from_column_slice(self.rows(), 1, self.data.column(j).as_slice()))
    }

    /// Horizontal concatenation of column blocks with equal row counts.
    pub fn hstack(blocks: &[ComplexMatrix]) -> ComplexMatrix {
        let rows = blocks.first().map_or(0, |b| b.rows());
        let cols = blocks.iter().map(|b| b.cols()).sum();
        let mut out = DMatrix::zeros(rows, cols);
        let mut at = 0;
        for b in blocks {
            assert_eq!(b.rows(), rows, "hstack: row mismatch");
            out.view_mut((0, at), (rows, b.cols())).copy_from(&b.data);
            at += b.cols();
        }
        Self::from_nalgebra(out)
    }

    /// Vertical concatenation of row blocks with equal column counts.
    pub fn vstack(blocks: &[ComplexMatrix]) -> ComplexMatrix {
        let cols = blocks.first().map_or(0, |b| b.cols());
        let rows = blocks.iter().map(|b| b.rows()).sum();
        let mut out = DMatrix::zeros(rows, cols);
        let mut at = 0;
        for b in blocks {
            assert_eq!(b.cols(), cols, "vstack: column mismatch");
            out.view_mut((at, 0), (b.rows(), cols)).copy_from(&b.data);
            at += b.rows();
        }
        Self::from_nalgebra(out)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols(), rhs.rows(), "matrix product: inner dimension mismatch");
        ComplexMatrix::from_nalgebra(&self.data * &rhs.data)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum: shape mismatch");
        ComplexMatrix::from_nalgebra(&self.data + &rhs.data)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix difference: shape mismatch");
        ComplexMatrix::from_nalgebra(&self.data - &rhs.data)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix::from_nalgebra(-&self.data)
    }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

pub fn opnorm(a: &ComplexMatrix) -> f64 {
    a.opnorm()
}

/// Right singular vectors of `l` whose singular value is at most
/// `tol·σ_max`, as the columns of an `n x k` matrix. Not canonicalized.
fn raw_nullspace(l: &DMatrix<Cx>, tol: Tolerance, scale: Option<f64>) -> DMatrix<Cx> {
    let (m, n) = l.shape();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    if m == 0 {
        return DMatrix::identity(n, n);
    }
    // Rows with at most one nonzero entry make the columns mutually
    // orthogonal; the singular values are then the column norms.
    let monomial_rows = l
        .row_iter()
        .all(|row| row.iter().filter(|z| z.norm_sqr() > 0.0).count() <= 1);
    if monomial_rows {
        let norms: Vec<f64> = l.column_iter().map(|c| c.norm()).collect();
        let smax = scale.unwrap_or_else(|| norms.iter().copied().fold(0.0, f64::max));
        let keep: Vec<usize> = (0..n).filter(|&j| norms[j] <= tol.value() * smax).collect();
        let mut out = DMatrix::zeros(n, keep.len());
        for (c, &j) in keep.iter().enumerate() {
            out[(j, c)] = cx(1.0, 0.0);
        }
        return out;
    }
    // Pad to at least n rows so the SVD returns a full set of right
    // singular vectors.
    let padded = if m < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (m, n)).copy_from(l);
        p
    } else {
        l.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("svd v_t");
    let sv = &svd.singular_values;
    let smax = scale.unwrap_or_else(|| sv.iter().copied().fold(0.0, f64::max));
    let keep: Vec<usize> = (0..sv.len()).filter(|&k| sv[k] <= tol.value() * smax).collect();
    let mut out = DMatrix::zeros(n, keep.len());
    for (c, &k) in keep.iter().enumerate() {
        for j in 0..n {
            out[(j, c)] = v_t[(k, j)].conj();
        }
    }
    out
}

/// Canonical orthonormal basis of the column span of `basis` (assumed
/// orthonormal): pivoted Gram–Schmidt on the columns of the projector
/// `basis·basis*`. The result depends only on the subspace, so it is
/// reproducible regardless of how the SVD mixed degenerate directions.
fn canonical_basis(basis: &DMatrix<Cx>) -> Vec<ComplexMatrix> {
    let (n, k) = basis.shape();
    if k == 0 {
        return Vec::new();
    }
    let proj = basis * basis.adjoint();
    let mut chosen: Vec<nalgebra::DVector<Cx>> = Vec::with_capacity(k);
    let mut residual = proj.clone();
    for _ in 0..k {
        let (j, norm) = (0..n)
            .map(|j| (j, residual.column(j).norm()))
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if norm <= 0.0 {
            break;
        }
        let v = residual.column(j) / cx(norm, 0.0);
        residual -= &v * v.adjoint() * &residual;
        chosen.push(v);
    }
    chosen
        .into_iter()
        .map(|v| ComplexMatrix::from_nalgebra(DMatrix::from_column_slice(n, 1, v.as_slice())))
        .collect()
}

/// Orthonormal basis of `{v : ‖Lv‖ ≤ tol·‖L‖_op·‖v‖}` as column vectors.
pub fn nullspace(l: &ComplexMatrix, tol: Tolerance) -> Vec<ComplexMatrix> {
    canonical_basis(&raw_nullspace(&l.data, tol, None))
}

/// Joint nullspace of several constraint blocks sharing the same column
/// count. Blocks are applied one after another, each restricted to the
/// nullspace found so far; the result equals the nullspace of the stacked
/// matrix. Put blocks with monomial rows (diagonal constraints) first.
///
/// Each restricted block is thresholded against the Frobenius norm of the
/// unrestricted block, an upper bound for its operator norm; a block that
/// vanishes on the current subspace then leaves it intact instead of
/// having its roundoff mistaken for signal.
pub fn nullspace_stacked(blocks: &[ComplexMatrix], n: usize, tol: Tolerance) -> Vec<ComplexMatrix> {
    let mut basis: Option<DMatrix<Cx>> = None;
    for block in blocks {
        assert_eq!(block.cols(), n, "nullspace_stacked: column mismatch");
        let restricted = match &basis {
            None => block.data.clone(),
            Some(b) => &block.data * b,
        };
        let ns = raw_nullspace(&restricted, tol, Some(block.data.norm()));
        basis = Some(match basis {
            None => ns,
            Some(b) => b * ns,
        });
        if basis.as_ref().is_some_and(|b| b.ncols() == 0) {
            return Vec::new();
        }
    }
    let basis = basis.unwrap_or_else(|| DMatrix::identity(n, n));
    // Re-orthonormalize against drift accumulated by the products.
    let q = if basis.ncols() > 0 { basis.qr().q() } else { basis };
    canonical_basis(&q)
}

/// Number of singular values above `tol·σ_max`.
pub fn rank(l: &ComplexMatrix, tol: Tolerance) -> usize {
    let sv = l.singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol.value() * smax).count()
}

/// Orthonormal basis (Hilbert–Schmidt) of the linear span of `items`, all
/// of one shape. Each returned matrix has that shape.
pub fn span_basis(items: &[ComplexMatrix], tol: Tolerance) -> Vec<ComplexMatrix> {
    let Some(first) = items.first() else {
        return Vec::new();
    };
    let (rows, cols) = first.shape();
    let stacked = ComplexMatrix::hstack(&items.iter().map(|m| m.vectorize()).collect::<Vec<_>>());
    if stacked.max_abs() == 0.0 {
        return Vec::new();
    }
    let svd = stacked.data.clone().svd(true, false);
    let u = svd.u.expect("svd u");
    let sv = &svd.singular_values;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..sv.len()).filter(|&k| sv[k] > tol.value() * smax).collect();
    let mut basis = DMatrix::zeros(rows * cols, keep.len());
    for (c, &k) in keep.iter().enumerate() {
        basis.set_column(c, &u.column(k));
    }
    canonical_basis(&basis)
        .into_iter()
        .map(|v| ComplexMatrix::unvec(rows, cols, &v))
        .collect()
}

/// Distance from `m` to the span of an orthonormal family (Hilbert–Schmidt).
pub fn projection_residual(m: &ComplexMatrix, orthonormal: &[ComplexMatrix]) -> f64 {
    let mut rest = m.clone();
    for b in orthonormal {
        let c = b.hs_inner(m);
        rest = &rest - &b.scale(c);
    }
    rest.frobenius_norm()
}

/// Largest deviation of an orthonormal family's Gram matrix from identity.
pub fn orthonormality_defect(family: &[ComplexMatrix]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in family.iter().enumerate() {
        for (j, b) in family.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a.hs_inner(b) - cx(target, 0.0)).norm());
        }
    }
    worst
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let (re, im) = self.entries().map(|z| (z.re, z.im)).unzip();
        MatrixJson {
            rows: self.rows(),
            cols: self.cols(),
            re,
            im,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(deserializer)?;
        if raw.re.len() != raw.im.len() {
            return Err(serde::de::Error::custom(ShapeError::PartMismatch {
                re: raw.re.len(),
                im: raw.im.len(),
            }));
        }
        let entries: Vec<Cx> = raw.re.iter().zip(&raw.im).map(|(&a, &b)| cx(a, b)).collect();
        ComplexMatrix::from_row_major(raw.rows, raw.cols, &entries).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::DEFAULT
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let k = kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2));
        assert_eq!(k, ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_diagonal_case() {
        let a = ComplexMatrix::diag(&[cx(1.0, 0.0), cx(2.0, 0.0)]);
        let k = kron(&a, &ComplexMatrix::identity(2));
        let expect = ComplexMatrix::diag(&[cx(1.0, 0.0), cx(1.0, 0.0), cx(2.0, 0.0), cx(2.0, 0.0)]);
        assert_eq!(k, expect);
    }

    #[test]
    fn kron_mixed_product() {
        let a = ComplexMatrix::from_fn(2, 3, |i, j| cx(i as f64 + 1.0, j as f64));
        let b = ComplexMatrix::from_fn(2, 2, |i, j| cx((i * j) as f64, 1.0));
        let c = ComplexMatrix::from_fn(3, 2, |i, j| cx(j as f64, i as f64 - 1.0));
        let d = ComplexMatrix::from_fn(2, 1, |i, _| cx(1.0, i as f64));
        let lhs = &kron(&a, &b) * &kron(&c, &d);
        let rhs = kron(&(&a * &c), &(&b * &d));
        assert!(lhs.distance(&rhs) < 1e-12);
    }

    #[test]
    fn adjoint_of_nilpotent() {
        let a = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(adjoint(&a), ComplexMatrix::from_real(2, 2, &[0.0, 0.0, 1.0, 0.0]));
        assert_eq!(adjoint(&ComplexMatrix::identity(3)), ComplexMatrix::identity(3));
    }

    #[test]
    fn opnorm_simple_cases() {
        assert_eq!(opnorm(&ComplexMatrix::zeros(3, 2)), 0.0);
        let d = ComplexMatrix::diag(&[cx(3.0, 0.0), cx(0.0, 4.0)]);
        assert!((opnorm(&d) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn nullspace_of_identity_is_empty() {
        assert!(nullspace(&ComplexMatrix::identity(4), tol()).is_empty());
    }

    #[test]
    fn nullspace_of_row_vector() {
        let l = ComplexMatrix::from_real(1, 2, &[1.0, 1.0]);
        let ns = nullspace(&l, tol());
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // proportional to (1,-1)/sqrt 2 up to a phase
        let overlap = v.get(0, 0).conj() * cx(s, 0.0) - v.get(1, 0).conj() * cx(s, 0.0);
        assert!((overlap.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nullspace_of_zero_matrix_is_everything() {
        let ns = nullspace(&ComplexMatrix::zeros(2, 3), tol());
        assert_eq!(ns.len(), 3);
    }

    #[test]
    fn stacked_matches_single_stack() {
        let a = ComplexMatrix::from_real(2, 4, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, -1.0, 0.0]);
        let b = ComplexMatrix::from_real(1, 4, &[0.0, 1.0, 1.0, 1.0]);
        let joint = nullspace(&ComplexMatrix::vstack(&[a.clone(), b.clone()]), tol());
        let seq = nullspace_stacked(&[a, b], 4, tol());
        assert_eq!(joint.len(), seq.len());
        for v in &joint {
            assert!(projection_residual(v, &seq) < 1e-10);
        }
    }

    #[test]
    fn span_basis_counts_dimension() {
        let a = ComplexMatrix::identity(2);
        let b = ComplexMatrix::diag(&[cx(1.0, 0.0), cx(-1.0, 0.0)]);
        let c = &a + &b;
        let basis = span_basis(&[a, b, c], tol());
        assert_eq!(basis.len(), 2);
        assert!(orthonormality_defect(&basis) < 1e-12);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let m = ComplexMatrix::from_fn(2, 3, |i, j| cx(i as f64, j as f64 * 0.5));
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.starts_with("{\"rows\":2,\"cols\":3,\"re\":"));
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let bad = r#"{"rows":2,"cols":2,"re":[1,2,3],"im":[0,0,0]}"#;
        assert!(serde_json::from_str::<ComplexMatrix>(bad).is_err());
    }

    #[test]
    fn tolerance_validation() {
        assert!(Tolerance::new(0.0).is_err());
        assert!(Tolerance::new(-1.0).is_err());
        assert!(Tolerance::new(1e-12).is_ok());
    }

    #[test]
    fn partial_trace_recovers_factor() {
        let t = ComplexMatrix::from_fn(2, 3, |i, j| cx(i as f64, j as f64));
        let big = t.kron(&ComplexMatrix::identity(2));
        let back = big.partial_trace_last(2).scale_real(0.5);
        assert!(back.distance(&t) < 1e-14);
    }
}
