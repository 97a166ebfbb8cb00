//! Finite simplicial base spaces and Čech data on their star covers.
//!
//! The patch of vertex `i` is the set of simplices containing `i`, so two
//! patches meet exactly when their vertices span an edge and the nerve of
//! the cover is the complex itself. Transition data is constant on each
//! overlap and stored for ordered pairs `i < j`; the value on `(j, i)` is
//! the inverse and the value on `(i, i)` is the identity.
//!
//! Circle phases are rationals `q` standing for `exp(2πi q)`, kept in the
//! window `(−1/2, 1/2]`, so every topological computation is exact integer
//! arithmetic.

mod smith;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groups::{enumerate_generated, find_element, GroupError, GroupKind, GroupSpec};
use crate::linalg::{cx, ComplexMatrix, Cx, Tolerance};

pub use smith::{smith_normal_form, IntMatrix, SmithForm};

/// Default bound on the denominator of a recognized determinant phase.
pub const DEFAULT_MAX_DENOMINATOR: i64 = 360;

/// Default bound on candidate assignments in the finite witness search.
pub const SEARCH_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CechError {
    #[error("simplex {0:?} has vertices outside 0..{1}")]
    VertexOutOfRange(Vec<usize>, usize),
    #[error("face {face:?} of simplex {simplex:?} is not listed")]
    NotFaceClosed { face: Vec<usize>, simplex: Vec<usize> },
    #[error("no value given on edge ({0}, {1})")]
    MissingValue(usize, usize),
    #[error("({0}, {1}) is not an edge of the complex")]
    NotAnEdge(usize, usize),
    #[error("coefficient kinds differ: {0:?} vs {1:?}")]
    KindMismatch(CoefficientKind, CoefficientKind),
    #[error("the two cochains live on different complexes")]
    CoverMismatch,
    #[error("cocycle identity fails on {simplex:?} (residual {residual:.3e})")]
    NotACocycle { simplex: [usize; 3], residual: f64 },
    #[error("integer 2-cochain is not a cocycle")]
    NotAnIntegralCocycle,
    #[error("class is not realized by a constant phase cocycle")]
    NotRealizable,
    #[error("determinant on edge ({0}, {1}) is not a rational phase with bounded denominator")]
    IrrationalPhase(usize, usize),
    #[error("witness search exceeds the cap of {cap} candidate assignments")]
    SearchCapExceeded { cap: usize },
    #[error("value on edge ({0}, {1}) is not a unitary matrix of the right degree")]
    BadMatrixValue(usize, usize),
    #[error("class has {got} coordinates, expected {expected}")]
    ClassShape { expected: usize, got: usize },
    #[error("malformed phase {0:?}")]
    BadPhase(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A finite abstract simplicial complex; simplices are sorted vertex lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ComplexJson", into = "ComplexJson")]
pub struct SimplicialComplex {
    vertex_count: usize,
    simplices: BTreeSet<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct ComplexJson {
    vertices: usize,
    simplices: Vec<Vec<usize>>,
}

impl TryFrom<ComplexJson> for SimplicialComplex {
    type Error = CechError;
    fn try_from(raw: ComplexJson) -> Result<Self, CechError> {
        SimplicialComplex::new(raw.vertices, raw.simplices)
    }
}

impl From<SimplicialComplex> for ComplexJson {
    fn from(c: SimplicialComplex) -> Self {
        let mut simplices: Vec<Vec<usize>> = c.simplices.into_iter().collect();
        simplices.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        ComplexJson {
            vertices: c.vertex_count,
            simplices,
        }
    }
}

fn faces(simplex: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    (0..simplex.len()).map(move |k| {
        let mut f = simplex.to_vec();
        f.remove(k);
        f
    })
}

impl SimplicialComplex {
    /// Checks that the listed simplices are closed under faces. Every vertex
    /// is a 0-simplex whether listed or not.
    pub fn new(vertex_count: usize, simplices: Vec<Vec<usize>>) -> Result<Self, CechError> {
        let mut set: BTreeSet<Vec<usize>> = (0..vertex_count).map(|v| vec![v]).collect();
        for mut s in simplices {
            s.sort_unstable();
            s.dedup();
            if s.iter().any(|&v| v >= vertex_count) {
                return Err(CechError::VertexOutOfRange(s, vertex_count));
            }
            if !s.is_empty() {
                set.insert(s);
            }
        }
        for s in &set {
            if s.len() > 1 {
                for f in faces(s) {
                    if !set.contains(&f) {
                        return Err(CechError::NotFaceClosed {
                            face: f,
                            simplex: s.clone(),
                        });
                    }
                }
            }
        }
        Ok(SimplicialComplex {
            vertex_count,
            simplices: set,
        })
    }

    /// The complex generated by the given facets.
    pub fn from_facets(vertex_count: usize, facets: &[Vec<usize>]) -> Result<Self, CechError> {
        let mut all = BTreeSet::new();
        let mut stack: Vec<Vec<usize>> = facets.to_vec();
        while let Some(mut s) = stack.pop() {
            s.sort_unstable();
            s.dedup();
            if s.is_empty() || all.contains(&s) {
                continue;
            }
            if s.len() > 1 {
                stack.extend(faces(&s));
            }
            all.insert(s);
        }
        Self::new(vertex_count, all.into_iter().collect())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn dimension(&self) -> usize {
        self.simplices.iter().map(|s| s.len() - 1).max().unwrap_or(0)
    }

    pub fn contains(&self, simplex: &[usize]) -> bool {
        let mut s = simplex.to_vec();
        s.sort_unstable();
        self.simplices.contains(&s)
    }

    /// Simplices of dimension `k` in lexicographic order.
    pub fn simplices(&self, k: usize) -> Vec<Vec<usize>> {
        self.simplices.iter().filter(|s| s.len() == k + 1).cloned().collect()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.simplices(1).into_iter().map(|e| (e[0], e[1])).collect()
    }

    pub fn triangles(&self) -> Vec<[usize; 3]> {
        self.simplices(2).into_iter().map(|t| [t[0], t[1], t[2]]).collect()
    }

    pub fn neighbours(&self, v: usize) -> Vec<usize> {
        self.edges()
            .into_iter()
            .filter_map(|(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    /// Simplicial coboundary `δ^k : C^k → C^{k+1}` as an integer matrix
    /// (rows indexed by `(k+1)`-simplices, columns by `k`-simplices).
    pub fn coboundary(&self, k: usize) -> IntMatrix {
        let lower = self.simplices(k);
        let upper = self.simplices(k + 1);
        let index: BTreeMap<&Vec<usize>, usize> = lower.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut m = IntMatrix::zeros(upper.len(), lower.len());
        for (row, s) in upper.iter().enumerate() {
            for (pos, f) in faces(s).enumerate() {
                let sign = if pos % 2 == 0 { 1 } else { -1 };
                m.set(row, index[&f], sign);
            }
        }
        m
    }

    /// Spanning forest as BFS order: `(root, [(parent, child)…])` per component.
    pub fn spanning_forest(&self) -> Vec<(usize, Vec<(usize, usize)>)> {
        let mut adjacency = vec![Vec::new(); self.vertex_count];
        for (a, b) in self.edges() {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        let mut seen = vec![false; self.vertex_count];
        let mut forest = Vec::new();
        for root in 0..self.vertex_count {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut tree = Vec::new();
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for &w in &adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        tree.push((v, w));
                        queue.push_back(w);
                    }
                }
            }
            forest.push((root, tree));
        }
        forest
    }

    /// Boundary of the octahedron: vertices `±x = 0,1`, `±y = 2,3`,
    /// `±z = 4,5`; one triangle per octant.
    pub fn octahedron() -> Self {
        let mut facets = Vec::new();
        for x in [0, 1] {
            for y in [2, 3] {
                for z in [4, 5] {
                    facets.push(vec![x, y, z]);
                }
            }
        }
        Self::from_facets(6, &facets).expect("octahedron")
    }

    /// A single 2-simplex with all its faces.
    pub fn triangle() -> Self {
        Self::from_facets(3, &[vec![0, 1, 2]]).expect("triangle")
    }

    pub fn disjoint_union(&self, other: &Self) -> Self {
        let shift = self.vertex_count;
        let simplices = self
            .simplices
            .iter()
            .cloned()
            .chain(other.simplices.iter().map(|s| s.iter().map(|v| v + shift).collect()))
            .collect();
        Self::new(self.vertex_count + other.vertex_count, simplices).expect("union of complexes")
    }

    /// Moore space `M(ℤ/n, 1)`: a disc whose boundary wraps `n` times
    /// around a triangle `a₀a₁a₂`. Vertices are `a₀..a₂`, an inner ring
    /// `c₀..c_{3n−1}` and a centre `z`, so `H² = ℤ/n` and `H¹ = 0`.
    pub fn moore_space(n: usize) -> Self {
        assert!(n >= 1, "moore_space needs n >= 1");
        let ring = 3 * n;
        let a = |k: usize| k % 3;
        let c = |k: usize| 3 + k % ring;
        let z = 3 + ring;
        let mut facets = Vec::new();
        for k in 0..ring {
            facets.push(vec![a(k), a(k + 1), c(k)]);
            facets.push(vec![a(k + 1), c(k), c(k + 1)]);
            facets.push(vec![c(k), c(k + 1), z]);
        }
        Self::from_facets(z + 1, &facets).expect("moore space")
    }
}

/// Star cover of a complex: patch `i` holds the simplices containing `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cover {
    complex: SimplicialComplex,
}

impl Cover {
    pub fn star(complex: SimplicialComplex) -> Self {
        Cover { complex }
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn patch_count(&self) -> usize {
        self.complex.vertex_count()
    }

    pub fn patch(&self, i: usize) -> Vec<Vec<usize>> {
        self.complex.simplices.iter().filter(|s| s.contains(&i)).cloned().collect()
    }

    /// Simplices in patch `i ∩ patch j`.
    pub fn overlap(&self, i: usize, j: usize) -> Vec<Vec<usize>> {
        self.complex
            .simplices
            .iter()
            .filter(|s| s.contains(&i) && s.contains(&j))
            .cloned()
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoefficientKind {
    #[serde(rename = "finite")]
    FiniteGroup,
    #[serde(rename = "phase")]
    CirclePhase,
    #[serde(rename = "int")]
    Integer,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CocycleValues {
    Finite(BTreeMap<(usize, usize), ComplexMatrix>),
    Phase(BTreeMap<(usize, usize), Rational64>),
    Integer(BTreeMap<(usize, usize), i64>),
}

/// Reduces a rational to the window `(−1/2, 1/2]`.
pub fn normalize_phase(q: Rational64) -> Rational64 {
    let half = Rational64::new(1, 2);
    q - (q - half).ceil()
}

/// Čech 1-cochain on the star cover; validated to have a value on every edge.
#[derive(Debug, Clone, PartialEq)]
pub struct CechCocycle {
    cover: Cover,
    values: CocycleValues,
}

/// First failure of the cocycle identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub simplex: [usize; 3],
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CocycleCheck {
    pub holds: bool,
    pub max_residual: f64,
    pub violation: Option<Violation>,
}

fn check_edges<T>(cover: &Cover, map: &BTreeMap<(usize, usize), T>) -> Result<(), CechError> {
    for &(i, j) in map.keys() {
        if i >= j || !cover.complex.contains(&[i, j]) {
            return Err(CechError::NotAnEdge(i, j));
        }
    }
    for (i, j) in cover.complex.edges() {
        if !map.contains_key(&(i, j)) {
            return Err(CechError::MissingValue(i, j));
        }
    }
    Ok(())
}

impl CechCocycle {
    /// Phases on edges `i < j`, normalized into `(−1/2, 1/2]`.
    pub fn phases(cover: Cover, values: BTreeMap<(usize, usize), Rational64>) -> Result<Self, CechError> {
        check_edges(&cover, &values)?;
        let values = values.into_iter().map(|(e, q)| (e, normalize_phase(q))).collect();
        Ok(CechCocycle {
            cover,
            values: CocycleValues::Phase(values),
        })
    }

    pub fn integers(cover: Cover, values: BTreeMap<(usize, usize), i64>) -> Result<Self, CechError> {
        check_edges(&cover, &values)?;
        Ok(CechCocycle {
            cover,
            values: CocycleValues::Integer(values),
        })
    }

    /// Unitary matrix values, all of one degree.
    pub fn matrices(cover: Cover, values: BTreeMap<(usize, usize), ComplexMatrix>) -> Result<Self, CechError> {
        check_edges(&cover, &values)?;
        let degree = values.values().next().map(|m| m.rows());
        for (&(i, j), m) in &values {
            let ok = Some(m.rows()) == degree
                && m.is_square()
                && m.unitarity_defect().is_some_and(|e| e <= 1e-8);
            if !ok {
                return Err(CechError::BadMatrixValue(i, j));
            }
        }
        Ok(CechCocycle {
            cover,
            values: CocycleValues::Finite(values),
        })
    }

    pub fn phase_from_fn(cover: Cover, f: impl Fn(usize, usize) -> Rational64) -> Self {
        let values = cover.complex.edges().into_iter().map(|(i, j)| ((i, j), f(i, j))).collect();
        Self::phases(cover, values).expect("values on all edges")
    }

    pub fn matrix_from_fn(cover: Cover, f: impl Fn(usize, usize) -> ComplexMatrix) -> Result<Self, CechError> {
        let values = cover.complex.edges().into_iter().map(|(i, j)| ((i, j), f(i, j))).collect();
        Self::matrices(cover, values)
    }

    pub fn trivial_phase(cover: Cover) -> Self {
        Self::phase_from_fn(cover, |_, _| Rational64::zero())
    }

    pub fn trivial_matrix(cover: Cover, degree: usize) -> Self {
        Self::matrix_from_fn(cover, |_, _| ComplexMatrix::identity(degree)).expect("identity values")
    }

    /// Phase coboundary `q_ij = a_i − a_j` of a 0-cochain.
    pub fn phase_coboundary(cover: Cover, a: &[Rational64]) -> Self {
        Self::phase_from_fn(cover, |i, j| a[i] - a[j])
    }

    /// Matrix coboundary `g_ij = u_i u_j⁻¹`.
    pub fn matrix_coboundary(cover: Cover, u: &[ComplexMatrix]) -> Result<Self, CechError> {
        Self::matrix_from_fn(cover, |i, j| &u[i] * &u[j].adjoint())
    }

    pub fn cover(&self) -> &Cover {
        &self.cover
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.cover.complex
    }

    pub fn values(&self) -> &CocycleValues {
        &self.values
    }

    pub fn kind(&self) -> CoefficientKind {
        match self.values {
            CocycleValues::Finite(_) => CoefficientKind::FiniteGroup,
            CocycleValues::Phase(_) => CoefficientKind::CirclePhase,
            CocycleValues::Integer(_) => CoefficientKind::Integer,
        }
    }

    /// Matrix degree for matrix-valued cochains.
    pub fn degree(&self) -> Option<usize> {
        match &self.values {
            CocycleValues::Finite(m) => m.values().next().map(|x| x.rows()),
            _ => None,
        }
    }

    fn edge_value<T: Clone>(
        map: &BTreeMap<(usize, usize), T>,
        i: usize,
        j: usize,
        invert: impl Fn(&T) -> T,
    ) -> Result<T, CechError> {
        if i < j {
            map.get(&(i, j)).cloned().ok_or(CechError::NotAnEdge(i, j))
        } else {
            map.get(&(j, i)).map(invert).ok_or(CechError::NotAnEdge(i, j))
        }
    }

    /// `g_ij` for an edge or `i = j`.
    pub fn matrix(&self, i: usize, j: usize) -> Result<ComplexMatrix, CechError> {
        match &self.values {
            CocycleValues::Finite(map) => {
                if i == j {
                    let d = self.degree().unwrap_or(1);
                    return Ok(ComplexMatrix::identity(d));
                }
                Self::edge_value(map, i, j, ComplexMatrix::adjoint)
            }
            _ => Err(CechError::KindMismatch(self.kind(), CoefficientKind::FiniteGroup)),
        }
    }

    pub fn phase(&self, i: usize, j: usize) -> Result<Rational64, CechError> {
        match &self.values {
            CocycleValues::Phase(map) => {
                if i == j {
                    return Ok(Rational64::zero());
                }
                Self::edge_value(map, i, j, |q| normalize_phase(-*q))
            }
            _ => Err(CechError::KindMismatch(self.kind(), CoefficientKind::CirclePhase)),
        }
    }

    pub fn integer(&self, i: usize, j: usize) -> Result<i64, CechError> {
        match &self.values {
            CocycleValues::Integer(map) => {
                if i == j {
                    return Ok(0);
                }
                Self::edge_value(map, i, j, |n| -*n)
            }
            _ => Err(CechError::KindMismatch(self.kind(), CoefficientKind::Integer)),
        }
    }

    /// The equivalent cochain `g′_ij = u_i⁻¹ g_ij u_j`.
    pub fn gauge_matrices(&self, u: &[ComplexMatrix]) -> Result<Self, CechError> {
        let edges = self.complex().edges();
        let mut values = BTreeMap::new();
        for (i, j) in edges {
            values.insert((i, j), &(&u[i].adjoint() * &self.matrix(i, j)?) * &u[j]);
        }
        Self::matrices(self.cover.clone(), values)
    }

    /// The equivalent cochain `q′_ij = q_ij − a_i + a_j`.
    pub fn gauge_phases(&self, a: &[Rational64]) -> Result<Self, CechError> {
        let mut values = BTreeMap::new();
        for (i, j) in self.complex().edges() {
            values.insert((i, j), self.phase(i, j)? - a[i] + a[j]);
        }
        Self::phases(self.cover.clone(), values)
    }

    /// Pointwise product of two phase cochains (sum of phases).
    pub fn phase_product(&self, other: &Self) -> Result<Self, CechError> {
        self.same_cover(other)?;
        let mut values = BTreeMap::new();
        for (i, j) in self.complex().edges() {
            values.insert((i, j), self.phase(i, j)? + other.phase(i, j)?);
        }
        Self::phases(self.cover.clone(), values)
    }

    /// Pointwise product `g_ij g′_ij` of two matrix cochains.
    pub fn matrix_product(&self, other: &Self) -> Result<Self, CechError> {
        self.same_cover(other)?;
        let mut values = BTreeMap::new();
        for (i, j) in self.complex().edges() {
            values.insert((i, j), &self.matrix(i, j)? * &other.matrix(i, j)?);
        }
        Self::matrices(self.cover.clone(), values)
    }

    fn same_cover(&self, other: &Self) -> Result<(), CechError> {
        if self.cover != other.cover {
            return Err(CechError::CoverMismatch);
        }
        Ok(())
    }

    pub fn to_json(&self) -> CocycleJson {
        let values = match &self.values {
            CocycleValues::Finite(m) => m
                .iter()
                .map(|(&(i, j), x)| EdgeValue {
                    edge: [i, j],
                    value: serde_json::to_value(x).expect("matrix json"),
                })
                .collect(),
            CocycleValues::Phase(m) => m
                .iter()
                .map(|(&(i, j), q)| EdgeValue {
                    edge: [i, j],
                    value: serde_json::Value::String(format_phase(*q)),
                })
                .collect(),
            CocycleValues::Integer(m) => m
                .iter()
                .map(|(&(i, j), n)| EdgeValue {
                    edge: [i, j],
                    value: serde_json::Value::from(*n),
                })
                .collect(),
        };
        CocycleJson {
            coeff: self.kind(),
            values,
        }
    }

    /// Builds a cocycle from its JSON form on the given cover. Edges may be
    /// listed in either orientation; `(j, i)` entries are inverted.
    pub fn from_json(cover: Cover, raw: &CocycleJson) -> Result<Self, CechError> {
        match raw.coeff {
            CoefficientKind::CirclePhase => {
                let mut map = BTreeMap::new();
                for ev in &raw.values {
                    let q = match &ev.value {
                        serde_json::Value::String(s) => parse_phase(s)?,
                        serde_json::Value::Number(n) => {
                            Rational64::from_integer(n.as_i64().ok_or_else(|| CechError::BadPhase(n.to_string()))?)
                        }
                        other => return Err(CechError::BadPhase(other.to_string())),
                    };
                    let [i, j] = ev.edge;
                    map.insert(order(i, j), if i < j { q } else { -q });
                }
                Self::phases(cover, map)
            }
            CoefficientKind::Integer => {
                let mut map = BTreeMap::new();
                for ev in &raw.values {
                    let n = ev.value.as_i64().ok_or_else(|| CechError::BadPhase(ev.value.to_string()))?;
                    let [i, j] = ev.edge;
                    map.insert(order(i, j), if i < j { n } else { -n });
                }
                Self::integers(cover, map)
            }
            CoefficientKind::FiniteGroup => {
                let mut map = BTreeMap::new();
                for ev in &raw.values {
                    let [i, j] = ev.edge;
                    let m: ComplexMatrix =
                        serde_json::from_value(ev.value.clone()).map_err(|_| CechError::BadMatrixValue(i, j))?;
                    map.insert(order(i, j), if i < j { m } else { m.adjoint() });
                }
                Self::matrices(cover, map)
            }
        }
    }
}

fn order(i: usize, j: usize) -> (usize, usize) {
    (i.min(j), i.max(j))
}

/// Formats a phase as a reduced fraction `"p/q"`.
pub fn format_phase(q: Rational64) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_phase(s: &str) -> Result<Rational64, CechError> {
    let bad = || CechError::BadPhase(s.to_string());
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(p, q))
        }
        None => s.trim().parse::<i64>().map(Rational64::from_integer).map_err(|_| bad()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeValue {
    pub edge: [usize; 2],
    pub value: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocycleJson {
    pub coeff: CoefficientKind,
    pub values: Vec<EdgeValue>,
}

fn distance_to_integer(q: Rational64) -> f64 {
    let frac = q - q.round();
    frac.abs().to_f64().unwrap_or(f64::INFINITY)
}

/// Checks `g_ij g_jk = g_ik` on every 2-simplex.
pub fn is_cocycle(c: &CechCocycle) -> Result<CocycleCheck, CechError> {
    check_triangles(c, |i, j, k| match &c.values {
        CocycleValues::Phase(_) => Ok(distance_to_integer(c.phase(i, j)? + c.phase(j, k)? - c.phase(i, k)?)),
        CocycleValues::Integer(_) => Ok((c.integer(i, j)? + c.integer(j, k)? - c.integer(i, k)?).abs() as f64),
        CocycleValues::Finite(_) => {
            let lhs = &c.matrix(i, j)? * &c.matrix(j, k)?;
            Ok(lhs.distance(&c.matrix(i, k)?))
        }
    }, |c, r| match c.values {
        CocycleValues::Finite(_) => r <= Tolerance::DEFAULT.value() * 10.0,
        _ => r == 0.0,
    })
}

/// Checks the cocycle identity modulo a normal subgroup `G` of the value
/// group: `g_ij g_jk g_ik⁻¹ ∈ G` on every 2-simplex.
pub fn is_cocycle_mod(c: &CechCocycle, group: &GroupSpec) -> Result<CocycleCheck, CechError> {
    let tol = group.tolerance();
    let elements = if group.is_finite() { Some(group.elements()?) } else { None };
    check_triangles(c, |i, j, k| {
        let defect = &(&c.matrix(i, j)? * &c.matrix(j, k)?) * &c.matrix(i, k)?.adjoint();
        if defect.rows() != group.degree() {
            return Err(CechError::BadMatrixValue(i, j));
        }
        Ok(match group.kind() {
            GroupKind::FullUnitary => defect.unitarity_defect().unwrap_or(f64::INFINITY),
            GroupKind::SpecialUnitary => (defect.determinant() - cx(1.0, 0.0)).norm(),
            GroupKind::FiniteMatrix => elements
                .expect("finite")
                .iter()
                .map(|g| g.distance(&defect))
                .fold(f64::INFINITY, f64::min),
        })
    }, |_, r| r <= tol.value() * 10.0)
}

fn check_triangles(
    c: &CechCocycle,
    residual: impl Fn(usize, usize, usize) -> Result<f64, CechError>,
    passes: impl Fn(&CechCocycle, f64) -> bool,
) -> Result<CocycleCheck, CechError> {
    let mut out = CocycleCheck {
        holds: true,
        max_residual: 0.0,
        violation: None,
    };
    for [i, j, k] in c.complex().triangles() {
        let r = residual(i, j, k)?;
        out.max_residual = out.max_residual.max(r);
        if !passes(c, r) && out.violation.is_none() {
            out.holds = false;
            out.violation = Some(Violation {
                simplex: [i, j, k],
                residual: r,
            });
        }
    }
    Ok(out)
}

fn require_cocycle(c: &CechCocycle) -> Result<(), CechError> {
    let check = is_cocycle(c)?;
    match check.violation {
        Some(v) => Err(CechError::NotACocycle {
            simplex: v.simplex,
            residual: v.residual,
        }),
        None => Ok(()),
    }
}

/// A family `{u_i}` with `c′ = u·c` in the sense `u_i c′_ij = c_ij u_j`.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Phases(Vec<Rational64>),
    Integers(Vec<i64>),
    Matrices(Vec<ComplexMatrix>),
}

impl Serialize for Witness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Witness::Phases(a) => a.iter().map(|q| format_phase(*q)).collect::<Vec<_>>().serialize(s),
            Witness::Integers(a) => a.serialize(s),
            Witness::Matrices(a) => a.serialize(s),
        }
    }
}

/// Tree gauge: potentials that make the cochain vanish on a spanning forest.
fn phase_potential(c: &CechCocycle) -> Result<Vec<Rational64>, CechError> {
    let mut p = vec![Rational64::zero(); c.complex().vertex_count()];
    for (_, tree) in c.complex().spanning_forest() {
        for (v, w) in tree {
            p[w] = p[v] + c.phase(v, w)?;
        }
    }
    Ok(p)
}

/// Searches for a coboundary witness between two cocycles of the same kind.
///
/// Phase and integer cochains are brought to the gauge vanishing on a
/// spanning forest; they are equivalent exactly when the gauged values
/// agree, since the remaining freedom is a constant per component.
/// Matrix cochains are gauged the same way and then searched for a
/// per-component constant conjugator in the group generated by all values.
pub fn equivalent(c: &CechCocycle, c2: &CechCocycle) -> Result<Option<Witness>, CechError> {
    if c.kind() != c2.kind() {
        return Err(CechError::KindMismatch(c.kind(), c2.kind()));
    }
    c.same_cover(c2)?;
    require_cocycle(c)?;
    require_cocycle(c2)?;
    let edges = c.complex().edges();
    match c.kind() {
        CoefficientKind::CirclePhase => {
            let (p, p2) = (phase_potential(c)?, phase_potential(c2)?);
            for &(i, j) in &edges {
                let g = c.phase(i, j)? + p[i] - p[j];
                let g2 = c2.phase(i, j)? + p2[i] - p2[j];
                if !(g - g2).is_integer() {
                    return Ok(None);
                }
            }
            let a: Vec<Rational64> = p2.iter().zip(&p).map(|(x, y)| normalize_phase(*x - *y)).collect();
            debug_assert!(c.gauge_phases(&a).is_ok_and(|g| g == *c2));
            Ok(Some(Witness::Phases(a)))
        }
        CoefficientKind::Integer => {
            let mut p = vec![0i64; c.complex().vertex_count()];
            let mut p2 = p.clone();
            for (_, tree) in c.complex().spanning_forest() {
                for (v, w) in tree {
                    p[w] = p[v] + c.integer(v, w)?;
                    p2[w] = p2[v] + c2.integer(v, w)?;
                }
            }
            for &(i, j) in &edges {
                if c.integer(i, j)? + p[i] - p[j] != c2.integer(i, j)? + p2[i] - p2[j] {
                    return Ok(None);
                }
            }
            Ok(Some(Witness::Integers(p2.iter().zip(&p).map(|(x, y)| x - y).collect())))
        }
        CoefficientKind::FiniteGroup => {
            let degree = c.degree().unwrap_or(1);
            let gens: Vec<ComplexMatrix> = matrix_values(c).chain(matrix_values(c2)).collect();
            let candidates = enumerate_generated(&gens, degree, 4096, Tolerance::DEFAULT)
                .map_err(|_| CechError::SearchCapExceeded { cap: 4096 })?;
            conjugator_search(c, c2, &candidates, |x: &ComplexMatrix| x.distance(&ComplexMatrix::identity(degree)) <= 1e-8)
        }
    }
}

fn matrix_values(c: &CechCocycle) -> impl Iterator<Item = ComplexMatrix> + '_ {
    match &c.values {
        CocycleValues::Finite(m) => m.values().cloned().collect::<Vec<_>>().into_iter(),
        _ => Vec::new().into_iter(),
    }
}

/// Tree gauge for matrix cochains: `w_j = g_ji w_i`, so that
/// `w_i⁻¹ g_ij w_j = 1` on forest edges.
fn matrix_gauge(c: &CechCocycle) -> Result<Vec<ComplexMatrix>, CechError> {
    let d = c.degree().unwrap_or(1);
    let mut w = vec![ComplexMatrix::identity(d); c.complex().vertex_count()];
    for (_, tree) in c.complex().spanning_forest() {
        for (v, x) in tree {
            w[x] = &c.matrix(x, v)? * &w[v];
        }
    }
    Ok(w)
}

/// Searches a constant conjugator per component between the tree-gauged
/// cochains; `is_trivial(x)` decides whether `x` is the identity in the
/// coefficient group.
fn conjugator_search(
    c: &CechCocycle,
    c2: &CechCocycle,
    candidates: &[ComplexMatrix],
    is_trivial: impl Fn(&ComplexMatrix) -> bool,
) -> Result<Option<Witness>, CechError> {
    let forest = c.complex().spanning_forest();
    if candidates.len().saturating_mul(forest.len()) > SEARCH_CAP {
        return Err(CechError::SearchCapExceeded { cap: SEARCH_CAP });
    }
    let (w, w2) = (matrix_gauge(c)?, matrix_gauge(c2)?);
    let gauged = c.gauge_matrices(&w)?;
    let gauged2 = c2.gauge_matrices(&w2)?;
    let mut component = vec![0usize; c.complex().vertex_count()];
    for (k, (root, tree)) in forest.iter().enumerate() {
        component[*root] = k;
        for &(_, x) in tree {
            component[x] = k;
        }
    }
    let edges = c.complex().edges();
    let mut chosen = Vec::with_capacity(forest.len());
    for k in 0..forest.len() {
        let local: Vec<(usize, usize)> = edges.iter().copied().filter(|&(i, _)| component[i] == k).collect();
        let found = candidates.iter().find(|g| {
            local.iter().all(|&(i, j)| {
                let lhs = &(&g.adjoint() * &gauged.matrix(i, j).expect("edge")) * *g;
                is_trivial(&(&lhs * &gauged2.matrix(i, j).expect("edge").adjoint()))
            })
        });
        match found {
            Some(g) => chosen.push(g.clone()),
            None => return Ok(None),
        }
    }
    let u = (0..w.len())
        .map(|i| &(&w[i] * &chosen[component[i]]) * &w2[i].adjoint())
        .collect();
    Ok(Some(Witness::Matrices(u)))
}

/// Equivalence of `NG`-valued cocycles modulo the normal subgroup `G`:
/// witnesses `u_i ∈ NG` with `u_i⁻¹ g_ij u_j g′_ij⁻¹ ∈ G`.
///
/// For `G = U(d)` the quotient is trivial. For `G = SU(d)` the quotient is
/// the circle via `det`, and the search reduces to the determinant phase
/// cocycles; the witness is then scalar. For finite `G` the candidate
/// conjugators are the group generated by `G` and the values of both
/// cocycles.
pub fn equivalent_mod(c: &CechCocycle, c2: &CechCocycle, group: &GroupSpec) -> Result<Option<Witness>, CechError> {
    if c.kind() != CoefficientKind::FiniteGroup || c2.kind() != CoefficientKind::FiniteGroup {
        return Err(CechError::KindMismatch(c.kind(), CoefficientKind::FiniteGroup));
    }
    c.same_cover(c2)?;
    for x in [c, c2] {
        if let Some(v) = is_cocycle_mod(x, group)?.violation {
            return Err(CechError::NotACocycle {
                simplex: v.simplex,
                residual: v.residual,
            });
        }
    }
    let d = group.degree();
    let n = c.complex().vertex_count();
    match group.kind() {
        GroupKind::FullUnitary => Ok(Some(Witness::Matrices(vec![ComplexMatrix::identity(d); n]))),
        GroupKind::SpecialUnitary => {
            let (p, p2) = (det_pushforward(c)?, det_pushforward(c2)?);
            Ok(equivalent(&p, &p2)?.map(|w| match w {
                Witness::Phases(a) => Witness::Matrices(
                    a.iter()
                        .map(|q| {
                            let t = q.to_f64().expect("phase") / d as f64;
                            ComplexMatrix::identity(d).scale(crate::linalg::turns(t))
                        })
                        .collect(),
                ),
                other => other,
            }))
        }
        GroupKind::FiniteMatrix => {
            let gens: Vec<ComplexMatrix> = group
                .generators()
                .iter()
                .cloned()
                .chain(matrix_values(c))
                .chain(matrix_values(c2))
                .collect();
            let cap = group.enumeration_cap();
            let candidates = enumerate_generated(&gens, d, cap, group.tolerance())
                .map_err(|_| CechError::SearchCapExceeded { cap })?;
            let elements = group.elements()?;
            let tol = group.tolerance();
            conjugator_search(c, c2, &candidates, |x| find_element(elements, x, tol).is_some())
        }
    }
}

/// Largest residual of the witness relation `u_i⁻¹ g_ij u_j g′_ij⁻¹ ∈ G`:
/// distance to the identity for `group = None`, otherwise the membership
/// defect of the same quantity.
pub fn witness_residual(
    c: &CechCocycle,
    c2: &CechCocycle,
    witness: &Witness,
    group: Option<&GroupSpec>,
) -> Result<f64, CechError> {
    let mut worst: f64 = 0.0;
    for (i, j) in c.complex().edges() {
        let r = match witness {
            Witness::Phases(a) => distance_to_integer(c.phase(i, j)? - a[i] + a[j] - c2.phase(i, j)?),
            Witness::Integers(a) => (c.integer(i, j)? - a[i] + a[j] - c2.integer(i, j)?).abs() as f64,
            Witness::Matrices(u) => {
                let x = &(&(&u[i].adjoint() * &c.matrix(i, j)?) * &u[j]) * &c2.matrix(i, j)?.adjoint();
                match group.map(|g| g.kind()) {
                    None => x.distance(&ComplexMatrix::identity(x.rows())),
                    Some(GroupKind::FullUnitary) => x.unitarity_defect().unwrap_or(f64::INFINITY),
                    Some(GroupKind::SpecialUnitary) => {
                        (x.determinant() - cx(1.0, 0.0)).norm() + x.unitarity_defect().unwrap_or(f64::INFINITY)
                    }
                    Some(GroupKind::FiniteMatrix) => group
                        .expect("group")
                        .elements()?
                        .iter()
                        .map(|g| g.distance(&x))
                        .fold(f64::INFINITY, f64::min),
                }
            }
        };
        worst = worst.max(r);
    }
    Ok(worst)
}

/// Element of `H²(X, ℤ)` in Smith coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntegralCohomClass {
    pub free_coordinates: Vec<i64>,
    pub torsion_coordinates: Vec<i64>,
    pub torsion_orders: Vec<i64>,
}

impl IntegralCohomClass {
    pub fn is_zero(&self) -> bool {
        self.free_coordinates.iter().all(|&x| x == 0) && self.torsion_coordinates.iter().all(|&x| x == 0)
    }

    pub fn is_torsion(&self) -> bool {
        self.free_coordinates.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.torsion_orders, other.torsion_orders, "classes of different groups");
        IntegralCohomClass {
            free_coordinates: self
                .free_coordinates
                .iter()
                .zip(&other.free_coordinates)
                .map(|(a, b)| a + b)
                .collect(),
            torsion_coordinates: self
                .torsion_coordinates
                .iter()
                .zip(&other.torsion_coordinates)
                .zip(&self.torsion_orders)
                .map(|((a, b), n)| (a + b).rem_euclid(*n))
                .collect(),
            torsion_orders: self.torsion_orders.clone(),
        }
    }

    /// Single integer summary for groups `ℤ` or `ℤ/n`: the unique coordinate.
    pub fn as_scalar(&self) -> Option<i64> {
        match (self.free_coordinates.as_slice(), self.torsion_coordinates.as_slice()) {
            ([x], []) | ([], [x]) => Some(*x),
            ([], []) => Some(0),
            _ => None,
        }
    }
}

/// `H² = ker δ² / im δ¹` with the data needed to reduce cocycles to
/// coordinates and to lift coordinates back to cocycles.
#[derive(Debug, Clone)]
pub struct H2Presentation {
    pub free_rank: usize,
    pub torsion_orders: Vec<i64>,
    kernel_basis: IntMatrix,
    kernel_coords: IntMatrix,
    /// `U` of the Smith form of `δ¹` in kernel coordinates.
    quotient_u: IntMatrix,
    quotient_u_inv: IntMatrix,
    quotient_diag: Vec<i128>,
    free_signs: Vec<i128>,
    delta2: IntMatrix,
    triangle_count: usize,
}

/// Presents `H²(complex, ℤ)` via two Smith normal forms.
pub fn h2_integral(complex: &SimplicialComplex) -> H2Presentation {
    let delta1 = complex.coboundary(1);
    let delta2 = complex.coboundary(2);
    let t = delta1.rows();
    let s2 = smith_normal_form(&delta2);
    let r2 = s2.rank();
    let kernel_basis = s2.v.columns_from(r2);
    let kernel_coords = s2.v_inv.rows_from(r2);
    let k = kernel_basis.cols();
    // im δ¹ ⊆ ker δ², written in kernel coordinates.
    let x = kernel_coords.mul(&delta1);
    let sx = smith_normal_form(&x);
    let rx = sx.rank();
    let diag: Vec<i128> = (0..k).map(|i| if i < rx { sx.diagonal[i] } else { 0 }).collect();
    let torsion_orders = diag.iter().filter(|&&d| d > 1).map(|&d| d as i64).collect();
    let free_rank = k - rx;
    let mut free_signs = Vec::with_capacity(free_rank);
    for i in rx..k {
        let first = sx.u.row(i).iter().copied().find(|&v| v != 0).unwrap_or(1);
        free_signs.push(first.signum());
    }
    H2Presentation {
        free_rank,
        torsion_orders,
        kernel_basis,
        kernel_coords,
        quotient_u: sx.u,
        quotient_u_inv: sx.u_inv,
        quotient_diag: diag,
        free_signs,
        delta2,
        triangle_count: t,
    }
}

impl H2Presentation {
    /// Coordinates of the class of an integral 2-cocycle (indexed like
    /// `complex.triangles()`).
    pub fn reduce(&self, cochain: &[i64]) -> Result<IntegralCohomClass, CechError> {
        if cochain.len() != self.triangle_count {
            return Err(CechError::ClassShape {
                expected: self.triangle_count,
                got: cochain.len(),
            });
        }
        let n: Vec<i128> = cochain.iter().map(|&x| x as i128).collect();
        if self.delta2.rows() > 0 && self.delta2.mul_vec(&n).iter().any(|&x| x != 0) {
            return Err(CechError::NotAnIntegralCocycle);
        }
        let y = self.kernel_coords.mul_vec(&n);
        let z = self.quotient_u.mul_vec(&y);
        let mut free = Vec::new();
        let mut torsion = Vec::new();
        let mut f = 0;
        for (i, &d) in self.quotient_diag.iter().enumerate() {
            if d == 0 {
                free.push((z[i] * self.free_signs[f]) as i64);
                f += 1;
            } else if d > 1 {
                torsion.push(z[i].rem_euclid(d) as i64);
            }
        }
        Ok(IntegralCohomClass {
            free_coordinates: free,
            torsion_coordinates: torsion,
            torsion_orders: self.torsion_orders.clone(),
        })
    }

    /// An integral 2-cocycle representing the class with the given
    /// coordinates.
    pub fn representative(&self, free: &[i64], torsion: &[i64]) -> Result<Vec<i64>, CechError> {
        if free.len() != self.free_rank {
            return Err(CechError::ClassShape {
                expected: self.free_rank,
                got: free.len(),
            });
        }
        if torsion.len() != self.torsion_orders.len() {
            return Err(CechError::ClassShape {
                expected: self.torsion_orders.len(),
                got: torsion.len(),
            });
        }
        let mut z = vec![0i128; self.quotient_diag.len()];
        let (mut f, mut t) = (0, 0);
        for (i, &d) in self.quotient_diag.iter().enumerate() {
            if d == 0 {
                z[i] = free[f] as i128 * self.free_signs[f];
                f += 1;
            } else if d > 1 {
                z[i] = torsion[t] as i128;
                t += 1;
            }
        }
        let y = self.quotient_u_inv.mul_vec(&z);
        let n = self.kernel_basis.mul_vec(&y);
        Ok(n.into_iter().map(|x| x as i64).collect())
    }

    pub fn zero_class(&self) -> IntegralCohomClass {
        IntegralCohomClass {
            free_coordinates: vec![0; self.free_rank],
            torsion_coordinates: vec![0; self.torsion_orders.len()],
            torsion_orders: self.torsion_orders.clone(),
        }
    }
}

/// Integer 2-cochain `n_ijk = q_ij + q_jk − q_ik` of normalized lifts.
pub fn lift_cochain(c: &CechCocycle) -> Result<Vec<i64>, CechError> {
    if c.kind() != CoefficientKind::CirclePhase {
        return Err(CechError::KindMismatch(c.kind(), CoefficientKind::CirclePhase));
    }
    require_cocycle(c)?;
    c.complex()
        .triangles()
        .into_iter()
        .map(|[i, j, k]| {
            let n = c.phase(i, j)? + c.phase(j, k)? - c.phase(i, k)?;
            debug_assert!(n.is_integer());
            Ok(n.to_integer())
        })
        .collect()
}

/// The image of a circle-valued cocycle under `H¹(X, 𝕋) → H²(X, ℤ)`.
pub fn circle_class(c: &CechCocycle) -> Result<IntegralCohomClass, CechError> {
    circle_class_with(c, &h2_integral(c.complex()))
}

/// As [`circle_class`], reusing a presentation of `H²`.
pub fn circle_class_with(c: &CechCocycle, h2: &H2Presentation) -> Result<IntegralCohomClass, CechError> {
    h2.reduce(&lift_cochain(c)?)
}

/// A constant phase cocycle whose class is the given one.
///
/// Solves `δ¹q = n` over ℚ for a representative `n`. A solution exists
/// exactly for torsion classes: constant transition phases are flat, and a
/// free class cannot be the coboundary of a rational cochain.
pub fn phase_cocycle_for_class(
    cover: &Cover,
    class: &IntegralCohomClass,
) -> Result<CechCocycle, CechError> {
    let complex = cover.complex();
    let h2 = h2_integral(complex);
    if !class.is_torsion() {
        return Err(CechError::NotRealizable);
    }
    let n = h2.representative(&class.free_coordinates, &class.torsion_coordinates)?;
    let q = solve_rational(&complex.coboundary(1), &n).ok_or(CechError::NotRealizable)?;
    let edges = complex.edges();
    let values = edges.into_iter().zip(q).collect();
    CechCocycle::phases(cover.clone(), values)
}

/// Rational solution of `A x = b` via the Smith form, if one exists.
fn solve_rational(a: &IntMatrix, b: &[i64]) -> Option<Vec<Rational64>> {
    let s = smith_normal_form(a);
    let bb: Vec<i128> = b.iter().map(|&x| x as i128).collect();
    let ub = s.u.mul_vec(&bb);
    let mut y = vec![Rational64::zero(); a.cols()];
    for (i, &v) in ub.iter().enumerate() {
        let d = s.diagonal.get(i).copied().unwrap_or(0);
        if d == 0 {
            if v != 0 {
                return None;
            }
        } else {
            y[i] = Rational64::new(v as i64, d as i64);
        }
    }
    let x = (0..a.cols())
        .map(|r| {
            (0..a.cols()).fold(Rational64::zero(), |acc, k| acc + Rational64::from_integer(s.v.get(r, k) as i64) * y[k])
        })
        .collect();
    Some(x)
}

/// Nearest rational `p/q` with `q ≤ max_den` to the angle of `z` in turns,
/// if within `tol`.
pub fn recognize_phase(z: Cx, max_den: i64, tol: f64) -> Option<Rational64> {
    if (z.norm() - 1.0).abs() > tol.max(1e-12) * 10.0 {
        return None;
    }
    let turns = z.arg() / (2.0 * std::f64::consts::PI);
    (1..=max_den).find_map(|q| {
        let p = (turns * q as f64).round();
        ((turns - p / q as f64).abs() <= tol).then(|| normalize_phase(Rational64::new(p as i64, q)))
    })
}

/// `q_ij` with `exp(2πi q_ij) = det(u_ij)`.
pub fn det_pushforward(c: &CechCocycle) -> Result<CechCocycle, CechError> {
    det_pushforward_with(c, DEFAULT_MAX_DENOMINATOR, Tolerance::DEFAULT)
}

pub fn det_pushforward_with(c: &CechCocycle, max_den: i64, tol: Tolerance) -> Result<CechCocycle, CechError> {
    let mut values = BTreeMap::new();
    for (i, j) in c.complex().edges() {
        let det = c.matrix(i, j)?.determinant();
        let q = recognize_phase(det, max_den, tol.value()).ok_or(CechError::IrrationalPhase(i, j))?;
        values.insert((i, j), q);
    }
    CechCocycle::phases(c.cover.clone(), values)
}
