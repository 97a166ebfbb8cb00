//! Locally trivial bundles of symmetric tensor categories over a simplicial
//! base, glued from a cocycle of normalizer elements.
//!
//! An arrow `t ∈ (r, s)` of the glued category is a family `(t_i)` of fibre
//! intertwiners, one per patch, with `t_i = û_ij(t_j)` on every edge.
//! Arrows are constant on patches, so the glued spaces are the locally
//! constant sections of the associated bundle of intertwiner spaces.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::basecech::{
    circle_class_with, det_pushforward, equivalent_mod, h2_integral, is_cocycle_mod, normalize_phase,
    recognize_phase, witness_residual, CechCocycle, CechError, CocycleJson, CoefficientKind, Cover,
    IntegralCohomClass, SimplicialComplex, Witness, DEFAULT_MAX_DENOMINATOR,
};
use crate::groups::{verify_normalizer, GroupError, GroupSpec};
use crate::linalg::{cx, nullspace, opnorm, projection_residual, ComplexMatrix, Cx};
use crate::repcat::{
    antisym_projector, block_swap, contraction_constant, hat_action, intertwiners, special_isometry,
    IntertwinerSpace, RepcatError, DEFAULT_SIZE_CAP,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GlueError {
    #[error("cocycle identity fails modulo G on {simplex:?} (residual {residual:.3e})")]
    NotACocycleModG { simplex: [usize; 3], residual: f64 },
    #[error("value on edge ({0}, {1}) does not normalize the fibre group")]
    NotInNormalizer(usize, usize),
    #[error("gluing problem has {unknowns} unknowns, above the cap of {cap}")]
    SizeCapExceeded { unknowns: usize, cap: usize },
    #[error("cocycle values must be matrices of the group degree {0}")]
    DegreeMismatch(usize),
    #[error("the fibre group is not contained in SU(d)")]
    NotSpecialUnitary,
    #[error("local V-module on patch {patch} has rank {rank}, expected 1")]
    RankDeficientVModule { patch: usize, rank: usize },
    #[error("arrow shapes do not compose: {0}")]
    ArrowShape(String),
    #[error("the data live on different covers or fibre groups")]
    DatumMismatch,
    #[error("pair ({0}, {1}) is outside the arrow cap")]
    OutsideCap(usize, usize),
    #[error(transparent)]
    Cech(#[from] CechError),
    #[error(transparent)]
    Repcat(#[from] RepcatError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Cover, fibre group `G ⊆ SU(d)` (or `U(d)`) and an `NG`-valued cocycle
/// modulo `G`.
#[derive(Debug, Clone, PartialEq)]
pub struct GluingDatum {
    cover: Cover,
    group: GroupSpec,
    cocycle: CechCocycle,
}

#[derive(Serialize, Deserialize)]
pub struct GluingDatumJson {
    pub complex: SimplicialComplex,
    pub group: GroupSpec,
    pub cocycle: CocycleJson,
}

impl GluingDatum {
    pub fn new(group: GroupSpec, cocycle: CechCocycle) -> Result<Self, GlueError> {
        if cocycle.kind() != CoefficientKind::FiniteGroup {
            return Err(CechError::KindMismatch(cocycle.kind(), CoefficientKind::FiniteGroup).into());
        }
        let d = group.degree();
        if cocycle.degree().is_some_and(|k| k != d) {
            return Err(GlueError::DegreeMismatch(d));
        }
        for (i, j) in cocycle.complex().edges() {
            match verify_normalizer(&cocycle.matrix(i, j)?, &group) {
                Ok(_) => {}
                Err(GroupError::NotInNormalizer { .. } | GroupError::MatrixNotUnitary { .. }) => {
                    return Err(GlueError::NotInNormalizer(i, j))
                }
                Err(e) => return Err(e.into()),
            }
        }
        if let Some(v) = is_cocycle_mod(&cocycle, &group)?.violation {
            return Err(GlueError::NotACocycleModG {
                simplex: v.simplex,
                residual: v.residual,
            });
        }
        Ok(GluingDatum {
            cover: cocycle.cover().clone(),
            group,
            cocycle,
        })
    }

    /// The constant bundle: every transition is the identity.
    pub fn trivial(cover: Cover, group: GroupSpec) -> Self {
        let cocycle = CechCocycle::trivial_matrix(cover, group.degree());
        Self::new(group, cocycle).expect("identity cocycle")
    }

    /// Scalar transitions `u_ij = exp(2πi q_ij/d)·1` whose determinants are
    /// the given phase cocycle. Scalars normalize every `G`, and
    /// `u_ij u_jk u_ik⁻¹` is a `d`-th root of unity times `1`; this lies in
    /// `G` whenever `G` contains the centre of `SU(d)`.
    pub fn scalar_phases(group: GroupSpec, phases: &CechCocycle) -> Result<Self, GlueError> {
        let d = group.degree();
        let values = phases
            .complex()
            .edges()
            .into_iter()
            .map(|(i, j)| {
                let q = phases.phase(i, j)?;
                let t = *q.numer() as f64 / *q.denom() as f64 / d as f64;
                Ok(((i, j), ComplexMatrix::identity(d).scale(crate::linalg::turns(t))))
            })
            .collect::<Result<BTreeMap<_, _>, CechError>>()?;
        Self::new(group, CechCocycle::matrices(phases.cover().clone(), values)?)
    }

    pub fn from_json(raw: GluingDatumJson) -> Result<Self, GlueError> {
        let cover = Cover::star(raw.complex);
        let cocycle = CechCocycle::from_json(cover, &raw.cocycle)?;
        Self::new(raw.group, cocycle)
    }

    pub fn to_json(&self) -> GluingDatumJson {
        GluingDatumJson {
            complex: self.cover.complex().clone(),
            group: self.group.clone(),
            cocycle: self.cocycle.to_json(),
        }
    }

    pub fn cover(&self) -> &Cover {
        &self.cover
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn cocycle(&self) -> &CechCocycle {
        &self.cocycle
    }

    pub fn degree(&self) -> usize {
        self.group.degree()
    }

    pub fn patch_count(&self) -> usize {
        self.cover.patch_count()
    }

    /// `u_ij`, including `u_ii = 1` and `u_ji = u_ij*`.
    pub fn transition(&self, i: usize, j: usize) -> ComplexMatrix {
        self.cocycle.matrix(i, j).expect("edge of the cover")
    }
}

/// A family of fibre arrows `t_i ∈ (H^r, H^s)`, one per patch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluedArrow {
    pub r: usize,
    pub s: usize,
    pub components: Vec<ComplexMatrix>,
}

impl GluedArrow {
    /// Same matrix on every patch.
    pub fn constant(r: usize, s: usize, m: ComplexMatrix, patches: usize) -> Self {
        GluedArrow {
            r,
            s,
            components: vec![m; patches],
        }
    }

    pub fn identity(r: usize, d: usize, patches: usize) -> Self {
        Self::constant(r, r, ComplexMatrix::identity(d.pow(r as u32)), patches)
    }

    pub fn zero(r: usize, s: usize, d: usize, patches: usize) -> Self {
        Self::constant(r, s, ComplexMatrix::zeros(d.pow(s as u32), d.pow(r as u32)), patches)
    }

    pub fn patches(&self) -> usize {
        self.components.len()
    }

    /// `self ∘ other`, defined when `other.s = self.r`.
    pub fn compose(&self, other: &GluedArrow) -> Result<GluedArrow, GlueError> {
        if other.s != self.r || other.patches() != self.patches() {
            return Err(GlueError::ArrowShape(format!(
                "({}, {}) after ({}, {})",
                self.r, self.s, other.r, other.s
            )));
        }
        Ok(GluedArrow {
            r: other.r,
            s: self.s,
            components: self.components.iter().zip(&other.components).map(|(a, b)| a * b).collect(),
        })
    }

    pub fn adjoint(&self) -> GluedArrow {
        GluedArrow {
            r: self.s,
            s: self.r,
            components: self.components.iter().map(ComplexMatrix::adjoint).collect(),
        }
    }

    pub fn scale(&self, z: Cx) -> GluedArrow {
        GluedArrow {
            r: self.r,
            s: self.s,
            components: self.components.iter().map(|m| m.scale(z)).collect(),
        }
    }

    pub fn add(&self, other: &GluedArrow) -> Result<GluedArrow, GlueError> {
        if (self.r, self.s) != (other.r, other.s) || self.patches() != other.patches() {
            return Err(GlueError::ArrowShape("sum of arrows in different spaces".into()));
        }
        Ok(GluedArrow {
            r: self.r,
            s: self.s,
            components: self.components.iter().zip(&other.components).map(|(a, b)| a + b).collect(),
        })
    }

    /// Summed Hilbert–Schmidt inner product over patches.
    pub fn inner(&self, other: &GluedArrow) -> Cx {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.hs_inner(b))
            .sum()
    }

    /// Largest patchwise distance.
    pub fn distance(&self, other: &GluedArrow) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max)
    }

    /// Largest `‖t_i − û_ij(t_j)‖` over edges.
    pub fn compatibility_residual(&self, datum: &GluingDatum) -> f64 {
        datum
            .cover()
            .complex()
            .edges()
            .into_iter()
            .map(|(i, j)| {
                let moved = hat_action(&datum.transition(i, j), &self.components[j], self.r, self.s)
                    .expect("component shape");
                self.components[i].distance(&moved)
            })
            .fold(0.0, f64::max)
    }
}

/// `π_x(t)`: the component on the patch of vertex `x`.
pub fn fibre_eval(t: &GluedArrow, x: usize) -> &ComplexMatrix {
    &t.components[x]
}

/// `n_t(x) = ‖π_x(t)‖` and its supremum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormFunction {
    pub values: Vec<f64>,
    pub sup: f64,
}

pub fn norm_function(t: &GluedArrow) -> NormFunction {
    let values: Vec<f64> = t.components.iter().map(opnorm).collect();
    let sup = values.iter().copied().fold(0.0, f64::max);
    NormFunction { values, sup }
}

/// Norm of `t` as a single operator: the block-diagonal matrix of its
/// components acting on the direct sum of the fibres.
pub fn global_norm(t: &GluedArrow) -> f64 {
    let rows: usize = t.components.iter().map(|m| m.rows()).sum();
    let cols: usize = t.components.iter().map(|m| m.cols()).sum();
    let mut entries = vec![cx(0.0, 0.0); rows * cols];
    let (mut r0, mut c0) = (0, 0);
    for m in &t.components {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                entries[(r0 + i) * cols + c0 + j] = m.get(i, j);
            }
        }
        r0 += m.rows();
        c0 += m.cols();
    }
    ComplexMatrix::from_row_major(rows, cols, &entries).expect("block diagonal").opnorm()
}

/// Componentwise tensor product.
pub fn tensor_glued(t: &GluedArrow, t2: &GluedArrow) -> Result<GluedArrow, GlueError> {
    if t.patches() != t2.patches() {
        return Err(GlueError::ArrowShape("tensor of arrows over different covers".into()));
    }
    Ok(GluedArrow {
        r: t.r + t2.r,
        s: t.s + t2.s,
        components: t.components.iter().zip(&t2.components).map(|(a, b)| a.kron(b)).collect(),
    })
}

/// The constant family `ε(r, s) = θ(r, s)`.
pub fn glued_symmetry(r: usize, s: usize, datum: &GluingDatum) -> GluedArrow {
    GluedArrow::constant(r + s, r + s, block_swap(r, s, datum.degree()), datum.patch_count())
}

/// One glued arrow space with the fibre intertwiner space it lives in.
#[derive(Debug, Clone, PartialEq)]
pub struct GluedSpace {
    pub local: IntertwinerSpace,
    pub basis: Vec<GluedArrow>,
}

impl GluedSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Distance of `t` from the span of the basis (summed Hilbert–Schmidt).
    pub fn residual(&self, t: &GluedArrow) -> f64 {
        let mut rest = t.clone();
        for b in &self.basis {
            rest = rest.add(&b.scale(-b.inner(t))).expect("same space");
        }
        rest.inner(&rest).re.max(0.0).sqrt()
    }
}

/// Glued arrow spaces `(r, s)` for `r, s ≤ r_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct GluedCategory {
    datum: GluingDatum,
    r_max: usize,
    spaces: BTreeMap<(usize, usize), GluedSpace>,
}

/// Solves the edge constraints `c_i = M_ij c_j` on patchwise intertwiner
/// coordinates, where `M_ij` is the matrix of `û_ij` on the fibre space.
pub fn glue_space(datum: &GluingDatum, r: usize, s: usize) -> Result<GluedSpace, GlueError> {
    let local = intertwiners(datum.group(), r, s)?;
    let m = local.dim();
    let n = datum.patch_count();
    let unknowns = n * m;
    if unknowns > DEFAULT_SIZE_CAP {
        return Err(GlueError::SizeCapExceeded {
            unknowns,
            cap: DEFAULT_SIZE_CAP,
        });
    }
    if m == 0 {
        return Ok(GluedSpace { local, basis: Vec::new() });
    }
    let edges = datum.cover().complex().edges();
    let mut entries = vec![cx(0.0, 0.0); edges.len() * m * unknowns];
    for (e, &(i, j)) in edges.iter().enumerate() {
        let u = datum.transition(i, j);
        for b in 0..m {
            let moved = hat_action(&u, &local.basis[b], r, s)?;
            for a in 0..m {
                let row = e * m + a;
                if b == a {
                    entries[row * unknowns + i * m + a] += cx(1.0, 0.0);
                }
                entries[row * unknowns + j * m + b] -= local.basis[a].hs_inner(&moved);
            }
        }
    }
    let basis = if edges.is_empty() {
        (0..unknowns).map(|k| ComplexMatrix::basis_vector(unknowns, k)).collect()
    } else {
        let l = ComplexMatrix::from_row_major(edges.len() * m, unknowns, &entries).expect("constraint shape");
        nullspace(&l, datum.group().tolerance())
    };
    let basis = basis
        .into_iter()
        .map(|v| GluedArrow {
            r,
            s,
            components: (0..n)
                .map(|i| {
                    let coeffs: Vec<Cx> = (0..m).map(|a| v.get(i * m + a, 0)).collect();
                    local.combine(&coeffs)
                })
                .collect(),
        })
        .collect();
    Ok(GluedSpace { local, basis })
}

pub fn build_glued(datum: &GluingDatum, r_max: usize) -> Result<GluedCategory, GlueError> {
    let mut spaces = BTreeMap::new();
    for r in 0..=r_max {
        for s in 0..=r_max {
            spaces.insert((r, s), glue_space(datum, r, s)?);
        }
    }
    Ok(GluedCategory {
        datum: datum.clone(),
        r_max,
        spaces,
    })
}

/// Largest residuals of the closure properties of a glued category.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosureResiduals {
    pub composition: f64,
    pub adjoint: f64,
    pub tensor: f64,
    pub compatibility: f64,
    pub locality: f64,
}

impl GluedCategory {
    pub fn datum(&self) -> &GluingDatum {
        &self.datum
    }

    pub fn r_max(&self) -> usize {
        self.r_max
    }

    pub fn space(&self, r: usize, s: usize) -> Result<&GluedSpace, GlueError> {
        self.spaces.get(&(r, s)).ok_or(GlueError::OutsideCap(r, s))
    }

    pub fn dims(&self) -> BTreeMap<(usize, usize), usize> {
        self.spaces.iter().map(|(&k, v)| (k, v.dim())).collect()
    }

    pub fn contains(&self, t: &GluedArrow) -> Result<f64, GlueError> {
        Ok(self.space(t.r, t.s)?.residual(t))
    }

    /// Random element of a glued space with coefficients drawn by `rng`.
    pub fn random_arrow(&self, r: usize, s: usize, rng: &mut impl rand::Rng) -> Result<GluedArrow, GlueError> {
        let space = self.space(r, s)?;
        let d = self.datum.degree();
        let mut t = GluedArrow::zero(r, s, d, self.datum.patch_count());
        for b in &space.basis {
            let z = cx(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            t = t.add(&b.scale(z))?;
        }
        Ok(t)
    }

    /// Checks closure under `∘`, `*`, `⊗` on basis elements, compatibility of
    /// every basis arrow, and that components lie in the fibre spaces.
    pub fn closure_residuals(&self) -> Result<ClosureResiduals, GlueError> {
        let mut out = ClosureResiduals {
            composition: 0.0,
            adjoint: 0.0,
            tensor: 0.0,
            compatibility: 0.0,
            locality: 0.0,
        };
        for (&(_, s), space) in &self.spaces {
            for t in &space.basis {
                out.compatibility = out.compatibility.max(t.compatibility_residual(&self.datum));
                for c in &t.components {
                    out.locality = out.locality.max(projection_residual(c, &space.local.basis));
                }
                out.adjoint = out.adjoint.max(self.contains(&t.adjoint())?);
                for q in 0..=self.r_max {
                    if let Some(next) = self.spaces.get(&(s, q)).and_then(|sp| sp.basis.first()) {
                        out.composition = out.composition.max(self.contains(&next.compose(t)?)?);
                    }
                }
                if let Some(one) = self.spaces.get(&(1, 1)).and_then(|sp| sp.basis.first()) {
                    let tt = tensor_glued(t, one)?;
                    if let Ok(sp) = self.space(tt.r, tt.s) {
                        out.tensor = out.tensor.max(sp.residual(&tt));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Residuals of the functor `t_i ↦ (u_i*)^(t_i)` between two glued
/// categories.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctorResiduals {
    /// Images fail to lie in the target space by at most this much.
    pub into_target: f64,
    /// Target basis fails to lie in the span of images by at most this much.
    pub onto_target: f64,
    pub composition: f64,
    pub adjoint: f64,
    pub tensor: f64,
    pub symmetry: f64,
}

impl FunctorResiduals {
    pub fn max(&self) -> f64 {
        [
            self.into_target,
            self.onto_target,
            self.composition,
            self.adjoint,
            self.tensor,
            self.symmetry,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Coboundary witness with the verified functor it induces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsoWitness {
    pub units: Vec<ComplexMatrix>,
    pub cocycle_residual: f64,
    pub functor: FunctorResiduals,
    pub dims_agree: bool,
}

fn apply_witness(units: &[ComplexMatrix], t: &GluedArrow) -> GluedArrow {
    GluedArrow {
        r: t.r,
        s: t.s,
        components: t
            .components
            .iter()
            .zip(units)
            .map(|(c, u)| hat_action(&u.adjoint(), c, t.r, t.s).expect("shape"))
            .collect(),
    }
}

/// Decides whether two gluing data give isomorphic categories and, when
/// they do, checks the induced functor on all spaces up to `r_max`.
pub fn isomorphic(a: &GluingDatum, b: &GluingDatum, r_max: usize) -> Result<Option<IsoWitness>, GlueError> {
    if a.cover() != b.cover() || a.group() != b.group() {
        return Err(GlueError::DatumMismatch);
    }
    let Some(witness) = equivalent_mod(a.cocycle(), b.cocycle(), a.group())? else {
        return Ok(None);
    };
    let cocycle_residual = witness_residual(a.cocycle(), b.cocycle(), &witness, Some(a.group()))?;
    let units = match witness {
        Witness::Matrices(u) => u,
        _ => unreachable!("matrix cocycles give matrix witnesses"),
    };
    let cat_a = build_glued(a, r_max)?;
    let cat_b = build_glued(b, r_max)?;
    Ok(Some(check_functor(&cat_a, &cat_b, units, cocycle_residual)?))
}

/// Verifies `t ↦ (u_i*)^(t_i)` maps `cat_a` onto `cat_b` and preserves
/// `∘`, `*`, `⊗` and `ε`.
pub fn check_functor(
    cat_a: &GluedCategory,
    cat_b: &GluedCategory,
    units: Vec<ComplexMatrix>,
    cocycle_residual: f64,
) -> Result<IsoWitness, GlueError> {
    let f = |t: &GluedArrow| apply_witness(&units, t);
    let mut res = FunctorResiduals {
        into_target: 0.0,
        onto_target: 0.0,
        composition: 0.0,
        adjoint: 0.0,
        tensor: 0.0,
        symmetry: 0.0,
    };
    let r_max = cat_a.r_max().min(cat_b.r_max());
    let mut dims_agree = true;
    for r in 0..=r_max {
        for s in 0..=r_max {
            let (sa, sb) = (cat_a.space(r, s)?, cat_b.space(r, s)?);
            dims_agree &= sa.dim() == sb.dim();
            let images: Vec<GluedArrow> = sa.basis.iter().map(f).collect();
            for im in &images {
                res.into_target = res.into_target.max(sb.residual(im));
            }
            let image_space = GluedSpace {
                local: sb.local.clone(),
                basis: orthonormalize(&images),
            };
            for tb in &sb.basis {
                res.onto_target = res.onto_target.max(image_space.residual(tb));
            }
            for t in &sa.basis {
                res.adjoint = res.adjoint.max(f(&t.adjoint()).distance(&f(t).adjoint()));
                for q in 0..=r_max {
                    for t2 in cat_a.space(s, q)?.basis.iter().take(2) {
                        let lhs = f(&t2.compose(t)?);
                        let rhs = f(t2).compose(&f(t))?;
                        res.composition = res.composition.max(lhs.distance(&rhs));
                    }
                }
                if let Some(t2) = cat_a.space(1, 1)?.basis.first() {
                    let lhs = f(&tensor_glued(t, t2)?);
                    let rhs = tensor_glued(&f(t), &f(t2))?;
                    res.tensor = res.tensor.max(lhs.distance(&rhs));
                }
            }
        }
    }
    for r in 0..=r_max {
        for s in 0..=r_max - r {
            let eps = glued_symmetry(r, s, cat_a.datum());
            res.symmetry = res.symmetry.max(f(&eps).distance(&glued_symmetry(r, s, cat_b.datum())));
        }
    }
    Ok(IsoWitness {
        units,
        cocycle_residual,
        functor: res,
        dims_agree,
    })
}

/// Gram–Schmidt in the summed Hilbert–Schmidt inner product.
pub fn orthonormalize(items: &[GluedArrow]) -> Vec<GluedArrow> {
    let mut out: Vec<GluedArrow> = Vec::new();
    for t in items {
        let mut v = t.clone();
        for b in &out {
            v = v.add(&b.scale(-b.inner(&v))).expect("same space");
        }
        let norm = v.inner(&v).re.max(0.0).sqrt();
        if norm > 1e-9 {
            out.push(v.scale(cx(1.0 / norm, 0.0)));
        }
    }
    out
}

/// Twisted special object of a glued category and its Chern class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwistedSpecial {
    /// Global sections `V ∈ (0, d)` with `P∘V = V`.
    pub v_module: Vec<GluedArrow>,
    /// Transition phases `λ_ij = ⟨S, û_ij S⟩` of the line bundle, as
    /// rationals `q` with `λ = exp(2πi q)`.
    pub transition_phases: Vec<((usize, usize), String)>,
    /// Class read off from the local frames.
    pub class: IntegralCohomClass,
    /// `circle_class(det_pushforward(cocycle))`.
    pub pushforward_class: IntegralCohomClass,
    pub agree: bool,
    /// Largest residual of the twisted special object identities.
    pub tso_residual: f64,
    /// Largest `|λ_ij − det u_ij|`.
    pub frame_residual: f64,
}

/// Residual of `(V*⊗1)(1⊗V′) = (−1)^{d−1} d⁻¹ (V*∘V′)⊗1` and of
/// `V′∘V* ∈ ℂ·P`, componentwise.
fn tso_residual(vs: &[ComplexMatrix], d: usize) -> Result<f64, GlueError> {
    let id = ComplexMatrix::identity(d);
    let p = antisym_projector(d, d)?;
    let k = contraction_constant(d);
    let mut worst: f64 = 0.0;
    for v in vs {
        for w in vs {
            let lhs = &v.adjoint().kron(&id) * &id.kron(w);
            let rhs = (&v.adjoint() * w).kron(&id).scale_real(k);
            worst = worst.max(lhs.distance(&rhs));
            let outer = w * &v.adjoint();
            let along = p.hs_inner(&outer) / p.hs_inner(&p);
            worst = worst.max(outer.distance(&p.scale(along)));
        }
    }
    Ok(worst)
}

/// Reads off the line bundle of the twisted special object and its class.
///
/// On every patch the fibre isometry `S` spans the local module
/// `{V : P∘V = V} ∩ (H⁰, H^d)_G`; the transitions of the bundle in these
/// frames are `λ_ij = ⟨S, û_ij S⟩`. The global module of sections is
/// computed as well and checked against the twisted special object
/// identities; it is zero when the flat line bundle is nontrivial.
pub fn extract_twisted_special(cat: &GluedCategory) -> Result<TwistedSpecial, GlueError> {
    let datum = cat.datum();
    let d = datum.degree();
    if !datum.group().is_inside_special_unitary()? {
        return Err(GlueError::NotSpecialUnitary);
    }
    let tol = datum.group().tolerance();
    let s = special_isometry(d)?.s;
    let p = antisym_projector(d, d)?;
    let local = match cat.space(0, d) {
        Ok(sp) => sp.local.clone(),
        Err(_) => intertwiners(datum.group(), 0, d)?,
    };
    // Local module: intertwiners fixed by P.
    let fixed: Vec<ComplexMatrix> = local
        .basis
        .iter()
        .map(|b| &p * b)
        .filter(|b| b.frobenius_norm() > tol.value())
        .collect();
    let local_rank = crate::linalg::span_basis(&fixed, tol).len();
    if local_rank != 1 {
        return Err(GlueError::RankDeficientVModule {
            patch: 0,
            rank: local_rank,
        });
    }
    let mut frame_residual: f64 = 0.0;
    let mut phases = BTreeMap::new();
    for (i, j) in datum.cover().complex().edges() {
        let u = datum.transition(i, j);
        let lambda = s.hs_inner(&hat_action(&u, &s, 0, d)?);
        frame_residual = frame_residual.max((lambda - u.determinant()).norm());
        let q = recognize_phase(lambda, DEFAULT_MAX_DENOMINATOR, tol.value())
            .ok_or(CechError::IrrationalPhase(i, j))?;
        phases.insert((i, j), normalize_phase(q));
    }
    let line = CechCocycle::phases(datum.cover().clone(), phases)?;
    let h2 = h2_integral(datum.cover().complex());
    let class = circle_class_with(&line, &h2)?;
    let pushforward_class = circle_class_with(&det_pushforward(datum.cocycle())?, &h2)?;

    let sections = match cat.space(0, d) {
        Ok(sp) => sp.clone(),
        Err(_) => glue_space(datum, 0, d)?,
    };
    let projected: Vec<GluedArrow> = sections
        .basis
        .iter()
        .map(|v| GluedArrow {
            r: 0,
            s: d,
            components: v.components.iter().map(|c| &p * c).collect(),
        })
        .collect();
    let v_module = orthonormalize(&projected);
    let tso = if v_module.is_empty() {
        tso_residual(std::slice::from_ref(&s), d)?
    } else {
        let mut worst: f64 = 0.0;
        for i in 0..datum.patch_count() {
            let comps: Vec<ComplexMatrix> = v_module.iter().map(|v| v.components[i].clone()).collect();
            worst = worst.max(tso_residual(&comps, d)?);
        }
        worst
    };
    let transition_phases = line
        .complex()
        .edges()
        .into_iter()
        .map(|(i, j)| ((i, j), crate::basecech::format_phase(line.phase(i, j).expect("edge"))))
        .collect();
    Ok(TwistedSpecial {
        v_module,
        transition_phases,
        agree: class == pushforward_class,
        class,
        pushforward_class,
        tso_residual: tso,
        frame_residual,
    })
}

/// Local frames of the twisted special object: `S` on every patch.
pub fn local_frames(datum: &GluingDatum) -> Result<Vec<ComplexMatrix>, GlueError> {
    let s = special_isometry(datum.degree())?.s;
    Ok(vec![s; datum.patch_count()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::catalog;
    use num_rational::Rational64;

    fn octa() -> Cover {
        Cover::star(SimplicialComplex::octahedron())
    }

    #[test]
    fn trivial_bundle_matches_fibre() {
        let g = GroupSpec::special_unitary(2);
        let cat = build_glued(&GluingDatum::trivial(octa(), g.clone()), 2).unwrap();
        for ((r, s), dim) in cat.dims() {
            assert_eq!(dim, intertwiners(&g, r, s).unwrap().dim(), "({r},{s})");
        }
        let res = cat.closure_residuals().unwrap();
        assert!(res.composition < 1e-9 && res.adjoint < 1e-9 && res.tensor < 1e-9);
        assert!(res.compatibility < 1e-9 && res.locality < 1e-9);
    }

    #[test]
    fn coboundary_datum_is_isomorphic_to_trivial() {
        let g = GroupSpec::special_unitary(2);
        let a: Vec<Rational64> = (0..6).map(|i| Rational64::new(i, 5)).collect();
        let phases = CechCocycle::phase_coboundary(octa(), &a);
        let twisted = GluingDatum::scalar_phases(g.clone(), &phases).unwrap();
        let trivial = GluingDatum::trivial(octa(), g);
        let w = isomorphic(&twisted, &trivial, 2).unwrap().unwrap();
        assert!(w.dims_agree);
        assert!(w.functor.max() < 1e-9, "{:?}", w.functor);
        assert!(w.cocycle_residual < 1e-9);
    }

    #[test]
    fn nontrivial_moore_bundle_has_no_global_special_sections() {
        let cover = Cover::star(SimplicialComplex::moore_space(3));
        let class = IntegralCohomClass {
            free_coordinates: vec![],
            torsion_coordinates: vec![1],
            torsion_orders: vec![3],
        };
        let phases = crate::basecech::phase_cocycle_for_class(&cover, &class).unwrap();
        let datum = GluingDatum::scalar_phases(GroupSpec::special_unitary(2), &phases).unwrap();
        let cat = build_glued(&datum, 2).unwrap();
        assert_eq!(cat.space(0, 2).unwrap().dim(), 0);
        assert_eq!(cat.space(0, 1).unwrap().dim(), 0);
        assert_eq!(cat.space(1, 1).unwrap().dim(), 1);
        let tso = extract_twisted_special(&cat).unwrap();
        assert_eq!(tso.class, class);
        assert!(tso.agree);
        let trivial = GluingDatum::trivial(cover, GroupSpec::special_unitary(2));
        assert!(isomorphic(&datum, &trivial, 1).unwrap().is_none());
    }

    #[test]
    fn unitary_fibre_always_trivializes() {
        let cover = Cover::star(SimplicialComplex::triangle());
        let g = GroupSpec::full_unitary(2);
        let u = catalog::quaternion_matrix(0.6, 0.0, 0.8, 0.0);
        let c = CechCocycle::matrix_from_fn(cover.clone(), |i, j| if (i, j) == (0, 1) { u.clone() } else { ComplexMatrix::identity(2) })
            .unwrap();
        // Not a strict cocycle, but a cocycle modulo U(2).
        let datum = GluingDatum::new(g.clone(), c).unwrap();
        let w = isomorphic(&datum, &GluingDatum::trivial(cover, g), 2).unwrap().unwrap();
        assert!(w.dims_agree);
    }

    #[test]
    fn norm_and_symmetry() {
        let datum = GluingDatum::trivial(octa(), catalog::quaternion());
        let eps = glued_symmetry(1, 1, &datum);
        assert!(norm_function(&eps).values.iter().all(|&x| (x - 1.0).abs() < 1e-12));
        assert!(eps.compose(&eps).unwrap().distance(&GluedArrow::identity(2, 2, 6)) < 1e-15);
        let zero = GluedArrow::zero(1, 2, 2, 6);
        assert_eq!(norm_function(&zero).sup, 0.0);
        assert!((global_norm(&eps) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_normalizer_rejected() {
        let cover = Cover::star(SimplicialComplex::triangle());
        let c = (std::f64::consts::PI / 8.0).cos();
        let s = (std::f64::consts::PI / 8.0).sin();
        let u = catalog::quaternion_matrix(c, 0.0, s, 0.0);
        let coc = CechCocycle::matrix_coboundary(cover, &[u.clone(), ComplexMatrix::identity(2), ComplexMatrix::identity(2)])
            .unwrap();
        assert!(matches!(
            GluingDatum::new(catalog::quaternion(), coc),
            Err(GlueError::NotInNormalizer(..))
        ));
    }

    #[test]
    fn datum_json_round_trip() {
        let datum = GluingDatum::trivial(Cover::star(SimplicialComplex::triangle()), catalog::quaternion());
        let s = serde_json::to_string(&datum.to_json()).unwrap();
        let back = GluingDatum::from_json(serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back, datum);
    }
}
