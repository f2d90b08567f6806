//! Halfspace ingestion, exact vertex enumeration, and Delzant validation.
//!
//! A polytope is presented as a list of [`Facet`]s, each a halfspace
//! `⟨X_f, ξ⟩ + λ_f ≥ 0` with a primitive integer normal `X_f` and a rational
//! offset `λ_f`. [`build`] enumerates the vertices exactly, validates the
//! Delzant conditions (simple, rational, smooth), and returns either a
//! [`DelzantPolytope`] with per-vertex caches used by the chart modules, or a
//! structured list of [`Violation`]s.
//!
//! Vertex enumeration iterates over all `n`-subsets of facets with a
//! nonsingular normal matrix, solves each system in exact rational
//! arithmetic, keeps solutions satisfying every inequality, and deduplicates
//! by exact position. Boundedness is decided exactly through the recession
//! cone: the polytope is unbounded iff some nonzero integer direction `u`
//! satisfies `⟨X_f, u⟩ ≥ 0` for all facets, and any such cone has either a
//! lineality direction (normals of deficient rank) or an extreme ray cut out
//! by `n−1` independent normals — both are enumerable.
//!
//! Everything here is exact; floating point appears only in the cached `f64`
//! mirrors consumed by chart evaluation.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::lattice;
use crate::Error;

// ---------------------------------------------------------------------------
// Core data types
// ---------------------------------------------------------------------------

/// One halfspace `⟨X, ξ⟩ + λ ≥ 0` of the polytope presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    id: String,
    x: Vec<BigInt>,
    lambda: BigRational,
}

impl Facet {
    /// A facet from raw parts; validation happens in [`build`].
    pub fn new(id: impl Into<String>, x: Vec<BigInt>, lambda: BigRational) -> Self {
        Facet {
            id: id.into(),
            x,
            lambda,
        }
    }

    /// Convenience constructor from machine integers.
    pub fn from_ints(id: impl Into<String>, x: &[i64], lambda_num: i64, lambda_den: i64) -> Self {
        Facet::new(
            id,
            x.iter().map(|&v| BigInt::from(v)).collect(),
            BigRational::new(BigInt::from(lambda_num), BigInt::from(lambda_den)),
        )
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Primitive integer normal `X`.
    pub fn normal(&self) -> &[BigInt] {
        &self.x
    }

    /// Rational offset `λ`.
    pub fn offset(&self) -> &BigRational {
        &self.lambda
    }
}

/// A vertex of a validated polytope: its exact rational position and the
/// ordered set `F_v` of exactly `n` facets through it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    id: String,
    position: Vec<BigRational>,
    facet_set: Vec<String>,
}

impl Vertex {
    pub fn id(&self) -> &str {
        &self.id
    }

    /// Exact rational position.
    pub fn position(&self) -> &[BigRational] {
        &self.position
    }

    /// Position converted to doubles.
    pub fn position_f64(&self) -> Vec<f64> {
        self.position
            .iter()
            .map(|c| c.to_f64().expect("rational fits in f64"))
            .collect()
    }

    /// The facets through this vertex, in ascending id order. All chart
    /// coordinates are keyed by this list in this order.
    pub fn facet_set(&self) -> &[String] {
        &self.facet_set
    }
}

/// An open face of the polytope, identified by the exact set `G` of facets
/// containing it. `G = ∅` denotes the interior; `#G = codimension` for faces
/// of a valid (simple) polytope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceId {
    facet_ids: Vec<String>,
}

impl FaceId {
    /// Builds a face id; the facet list is sorted into canonical order.
    pub fn new(mut facet_ids: Vec<String>) -> Self {
        facet_ids.sort();
        facet_ids.dedup();
        FaceId { facet_ids }
    }

    pub fn interior() -> Self {
        FaceId {
            facet_ids: Vec::new(),
        }
    }

    pub fn facet_ids(&self) -> &[String] {
        &self.facet_ids
    }

    pub fn is_interior(&self) -> bool {
        self.facet_ids.is_empty()
    }
}

impl fmt::Display for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.facet_ids.join(", "))
    }
}

/// The integer base-change matrix between two vertex bases: entry `(f, g)`
/// is the coefficient of the target-basis normal `X_g` in the expansion of
/// the source-basis normal `X_f`, so `X_f = Σ_g entry(f,g) · X_g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseChange {
    from_vertex: String,
    to_vertex: String,
    row_facets: Vec<String>,
    col_facets: Vec<String>,
    matrix: Vec<Vec<BigInt>>,
}

impl BaseChange {
    pub fn from_vertex(&self) -> &str {
        &self.from_vertex
    }

    pub fn to_vertex(&self) -> &str {
        &self.to_vertex
    }

    /// Row keys: the facets of the source vertex, in chart order.
    pub fn row_facets(&self) -> &[String] {
        &self.row_facets
    }

    /// Column keys: the facets of the target vertex, in chart order.
    pub fn col_facets(&self) -> &[String] {
        &self.col_facets
    }

    /// The full matrix, rows keyed by `row_facets`, columns by `col_facets`.
    pub fn matrix(&self) -> &[Vec<BigInt>] {
        &self.matrix
    }

    /// Entry for a (row facet, column facet) pair.
    pub fn entry(&self, row_facet: &str, col_facet: &str) -> Option<&BigInt> {
        let r = self.row_facets.iter().position(|f| f == row_facet)?;
        let c = self.col_facets.iter().position(|g| g == col_facet)?;
        Some(&self.matrix[r][c])
    }

    pub fn is_identity(&self) -> bool {
        self.row_facets == self.col_facets
            && self.matrix.iter().enumerate().all(|(i, row)| {
                row.iter()
                    .enumerate()
                    .all(|(j, e)| if i == j { e.is_one() } else { e.is_zero() })
            })
    }

    /// Composes two base changes: `self` from `u` to `v`, then `other` from
    /// `v` to `w`, giving the base change from `u` to `w`. The matrices
    /// compose by ordinary multiplication row-by-row.
    pub fn compose(&self, other: &BaseChange) -> Result<BaseChange, Error> {
        if self.to_vertex != other.from_vertex || self.col_facets != other.row_facets {
            return Err(Error::InvalidParameter(format!(
                "cannot compose base change into `{}` with base change out of `{}`",
                self.to_vertex, other.from_vertex
            )));
        }
        let rows = self.matrix.len();
        let mid = other.matrix.len();
        let cols = other.col_facets.len();
        let mut matrix = vec![vec![BigInt::zero(); cols]; rows];
        for i in 0..rows {
            for k in 0..mid {
                if self.matrix[i][k].is_zero() {
                    continue;
                }
                for j in 0..cols {
                    let term = &self.matrix[i][k] * &other.matrix[k][j];
                    matrix[i][j] += term;
                }
            }
        }
        Ok(BaseChange {
            from_vertex: self.from_vertex.clone(),
            to_vertex: other.to_vertex.clone(),
            row_facets: self.row_facets.clone(),
            col_facets: other.col_facets.clone(),
            matrix,
        })
    }
}

// ---------------------------------------------------------------------------
// Validation outcome
// ---------------------------------------------------------------------------

/// One structural defect found while validating a polytope presentation.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// The requested ambient dimension is zero.
    InvalidDimension,
    /// A facet normal has the wrong length for the ambient dimension.
    NormalLengthMismatch {
        facet: String,
        expected: usize,
        got: usize,
    },
    /// Two facets share an id.
    DuplicateFacetId { facet: String },
    /// A facet normal is zero or has gcd of entries greater than 1.
    NonPrimitiveNormal { facet: String },
    /// The recession cone contains the given nonzero integer direction.
    Unbounded { direction: Vec<BigInt> },
    /// No vertex exists, or all vertices lie in a common facet hyperplane.
    EmptyOrLowerDimensional { detail: String },
    /// A vertex violates the Delzant condition: either it lies on more than
    /// `n` facets (non-simple; `det` is reported as 0), or its `n` facet
    /// normals fail to form a ℤ-basis (`|det| ≠ 1`).
    NonUnimodularVertex {
        position: Vec<BigRational>,
        facet_set: Vec<String>,
        det: BigInt,
    },
    /// A facet whose hyperplane touches no vertex.
    RedundantFacet { facet: String },
}

fn fmt_position(pos: &[BigRational]) -> String {
    format!("({})", pos.iter().map(|c| c.to_string()).join(", "))
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InvalidDimension => write!(f, "ambient dimension must be at least 1"),
            Violation::NormalLengthMismatch {
                facet,
                expected,
                got,
            } => write!(
                f,
                "facet `{facet}`: normal has {got} entries, expected {expected}"
            ),
            Violation::DuplicateFacetId { facet } => write!(f, "duplicate facet id `{facet}`"),
            Violation::NonPrimitiveNormal { facet } => write!(
                f,
                "facet `{facet}`: normal is not primitive (zero, or gcd of entries > 1)"
            ),
            Violation::Unbounded { direction } => write!(
                f,
                "polytope is unbounded: direction ({}) lies in the recession cone",
                direction.iter().map(|c| c.to_string()).join(", ")
            ),
            Violation::EmptyOrLowerDimensional { detail } => {
                write!(f, "polytope is empty or not full-dimensional: {detail}")
            }
            Violation::NonUnimodularVertex {
                position,
                facet_set,
                det,
            } => {
                if det.is_zero() {
                    write!(
                        f,
                        "non-simple vertex at {}: lies on {} facets {{{}}}",
                        fmt_position(position),
                        facet_set.len(),
                        facet_set.join(", ")
                    )
                } else {
                    write!(
                        f,
                        "non-unimodular vertex at {}: facets {{{}}}, determinant {det}",
                        fmt_position(position),
                        facet_set.join(", ")
                    )
                }
            }
            Violation::RedundantFacet { facet } => {
                write!(f, "facet `{facet}` contains no vertex (redundant halfspace)")
            }
        }
    }
}

/// The structured outcome of a failed validation: every violation found, not
/// just the first.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationError {
    violations: Vec<Violation>,
}

impl ValidationError {
    fn new(violations: Vec<Violation>) -> Self {
        ValidationError { violations }
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "polytope failed validation with {} violation(s):",
            self.violations.len()
        )?;
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationError {}

// ---------------------------------------------------------------------------
// Per-vertex chart caches
// ---------------------------------------------------------------------------

/// Precomputed exact data for one vertex chart, built once at validation
/// time and read-only afterwards.
#[derive(Debug, Clone)]
pub(crate) struct ChartCache {
    /// Facet indices of `F_v`, ascending (chart coordinate order).
    pub(crate) basis: Vec<usize>,
    /// Facet indices of `F ∖ F_v`, ascending.
    pub(crate) excluded: Vec<usize>,
    /// Exact integer inverse of the transposed basis matrix, stored as
    /// doubles: row `i` dotted with the per-facet right-hand side yields the
    /// `i`-th momentum coordinate.
    pub(crate) inv_bt: Vec<Vec<f64>>,
    /// For each excluded facet (parallel to `excluded`): the integer
    /// coefficients expressing its normal in the vertex basis, indexed
    /// parallel to `basis`.
    pub(crate) excluded_coeffs: Vec<Vec<i64>>,
    /// Vertex position as doubles.
    pub(crate) position_f64: Vec<f64>,
}

// ---------------------------------------------------------------------------
// The validated polytope
// ---------------------------------------------------------------------------

/// A validated Delzant polytope: facets in canonical (ascending id) order,
/// exactly enumerated vertices, and the per-vertex caches that drive chart
/// evaluation. Immutable after construction; all queries are pure.
#[derive(Debug, Clone)]
pub struct DelzantPolytope {
    dim: usize,
    facets: Vec<Facet>,
    vertices: Vec<Vertex>,
    facet_index: HashMap<String, usize>,
    vertex_index: HashMap<String, usize>,
    charts: Vec<ChartCache>,
    /// Base-change exponent tables for every ordered vertex pair `(v, w)`:
    /// `base_changes[v][w][f][g]` expresses `X_f` (f-th facet of `F_v`) in
    /// the basis of `F_w`.
    base_changes: Vec<Vec<Vec<Vec<i64>>>>,
    normals_f64: Vec<Vec<f64>>,
    lambda_f64: Vec<f64>,
    barycenter: Vec<BigRational>,
    barycenter_f64: Vec<f64>,
    /// Minimum facet slack at the vertex barycenter: a cheap positive
    /// interior-size proxy used for default sampling margins.
    inradius_proxy: f64,
}

impl DelzantPolytope {
    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Facets in canonical ascending-id order.
    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Vertices with ids `v0, v1, …` assigned in lexicographic order of
    /// their sorted facet-id lists.
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn facet(&self, id: &str) -> Option<&Facet> {
        self.facet_index.get(id).map(|&i| &self.facets[i])
    }

    pub fn vertex(&self, id: &str) -> Option<&Vertex> {
        self.vertex_index.get(id).map(|&i| &self.vertices[i])
    }

    pub(crate) fn facet_idx(&self, id: &str) -> Result<usize, Error> {
        self.facet_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownFacet(id.to_string()))
    }

    pub(crate) fn vertex_idx(&self, id: &str) -> Result<usize, Error> {
        self.vertex_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub(crate) fn chart(&self, vertex_idx: usize) -> &ChartCache {
        &self.charts[vertex_idx]
    }

    pub(crate) fn exponents(&self, from_idx: usize, to_idx: usize) -> &Vec<Vec<i64>> {
        &self.base_changes[from_idx][to_idx]
    }

    pub(crate) fn lambda_f64(&self, facet_idx: usize) -> f64 {
        self.lambda_f64[facet_idx]
    }

    /// `⟨X_f, ξ⟩ + λ_f` in doubles.
    pub(crate) fn slack_f64(&self, facet_idx: usize, xi: &[f64]) -> f64 {
        let mut s = self.lambda_f64[facet_idx];
        for (a, b) in self.normals_f64[facet_idx].iter().zip(xi) {
            s += a * b;
        }
        s
    }

    pub(crate) fn barycenter_f64(&self) -> &[f64] {
        &self.barycenter_f64
    }

    /// Exact barycenter of the vertex set; an interior point of the polytope.
    pub fn barycenter(&self) -> &[BigRational] {
        &self.barycenter
    }

    /// Minimum facet slack at the vertex barycenter — a positive proxy for
    /// the interior size, used for default sampling margins.
    pub fn inradius_proxy(&self) -> f64 {
        self.inradius_proxy
    }

    /// Exact slack `⟨X_f, ξ⟩ + λ_f` of a facet at a rational point.
    fn slack_exact(&self, facet_idx: usize, xi: &[BigRational]) -> BigRational {
        let facet = &self.facets[facet_idx];
        let mut s = facet.lambda.clone();
        for (a, b) in facet.x.iter().zip(xi) {
            s += BigRational::from(a.clone()) * b;
        }
        s
    }

    /// Exact membership: true iff every facet inequality holds at `xi`.
    ///
    /// # Errors
    /// [`Error::DimensionMismatch`] if `xi` has the wrong length.
    pub fn contains(&self, xi: &[BigRational]) -> Result<bool, Error> {
        if xi.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: xi.len(),
            });
        }
        Ok((0..self.facets.len()).all(|f| !self.slack_exact(f, xi).is_negative()))
    }

    /// The open face containing `xi`: the exact set of facets tight at `xi`.
    ///
    /// # Errors
    /// [`Error::PointOutsideDelta`] if some inequality fails;
    /// [`Error::DimensionMismatch`] on a wrong-length vector.
    pub fn face_containing(&self, xi: &[BigRational]) -> Result<FaceId, Error> {
        if xi.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: xi.len(),
            });
        }
        let mut tight = Vec::new();
        for (f, facet) in self.facets.iter().enumerate() {
            let s = self.slack_exact(f, xi);
            if s.is_negative() {
                return Err(Error::PointOutsideDelta {
                    facet: facet.id.clone(),
                    slack: s.to_f64().unwrap_or(f64::NEG_INFINITY),
                });
            }
            if s.is_zero() {
                tight.push(facet.id.clone());
            }
        }
        Ok(FaceId { facet_ids: tight })
    }

    /// Floating-point variant of [`face_containing`]: facets with
    /// `|slack| ≤ tol` count as tight, and slacks below `−tol` reject the
    /// point. Used to compare strata of chart points against faces of their
    /// momentum images.
    ///
    /// [`face_containing`]: DelzantPolytope::face_containing
    pub fn face_containing_f64(&self, xi: &[f64], tol: f64) -> Result<FaceId, Error> {
        if xi.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: xi.len(),
            });
        }
        let mut tight = Vec::new();
        for (f, facet) in self.facets.iter().enumerate() {
            let s = self.slack_f64(f, xi);
            if s < -tol {
                return Err(Error::PointOutsideDelta {
                    facet: facet.id.clone(),
                    slack: s,
                });
            }
            if s.abs() <= tol {
                tight.push(facet.id.clone());
            }
        }
        Ok(FaceId { facet_ids: tight })
    }

    /// The facets excluded from the chart domain of `v`: all facets not
    /// through `v`. A point `ξ` belongs to the chart image iff it lies in
    /// the polytope with strictly positive slack on each returned facet.
    pub fn delta_v_facets(&self, v: &str) -> Result<Vec<String>, Error> {
        let vi = self.vertex_idx(v)?;
        Ok(self.charts[vi]
            .excluded
            .iter()
            .map(|&f| self.facets[f].id.clone())
            .collect())
    }

    /// The exact integer base change from the basis of `v` to the basis of
    /// `w`: row `f ∈ F_v`, column `g ∈ F_w`, with `X_f = Σ_g entry · X_g`.
    pub fn base_change(&self, v: &str, w: &str) -> Result<BaseChange, Error> {
        let vi = self.vertex_idx(v)?;
        let wi = self.vertex_idx(w)?;
        let matrix = self.base_changes[vi][wi]
            .iter()
            .map(|row| row.iter().map(|&e| BigInt::from(e)).collect())
            .collect();
        Ok(BaseChange {
            from_vertex: v.to_string(),
            to_vertex: w.to_string(),
            row_facets: self.vertices[vi].facet_set.clone(),
            col_facets: self.vertices[wi].facet_set.clone(),
            matrix,
        })
    }
}

// ---------------------------------------------------------------------------
// build: validation pipeline
// ---------------------------------------------------------------------------

/// Validates a halfspace presentation and builds the polytope.
///
/// The pipeline: facet shape and primitivity checks, duplicate ids,
/// exact boundedness (recession cone), exact vertex enumeration,
/// full-dimensionality, per-vertex simplicity and unimodularity, and
/// facet redundancy. All violations discovered at the deepest stage
/// reached are reported together.
pub fn build(n: usize, facets: Vec<Facet>) -> Result<DelzantPolytope, ValidationError> {
    if n == 0 {
        return Err(ValidationError::new(vec![Violation::InvalidDimension]));
    }

    // Canonical facet order: ascending id.
    let mut facets = facets;
    facets.sort_by(|a, b| a.id.cmp(&b.id));

    let mut violations = Vec::new();
    for pair in facets.windows(2) {
        if pair[0].id == pair[1].id {
            violations.push(Violation::DuplicateFacetId {
                facet: pair[0].id.clone(),
            });
        }
    }
    for facet in &facets {
        if facet.x.len() != n {
            violations.push(Violation::NormalLengthMismatch {
                facet: facet.id.clone(),
                expected: n,
                got: facet.x.len(),
            });
        } else if !lattice::is_primitive(&facet.x) {
            violations.push(Violation::NonPrimitiveNormal {
                facet: facet.id.clone(),
            });
        }
    }
    if !violations.is_empty() {
        return Err(ValidationError::new(violations));
    }

    // Boundedness: the recession cone {u : ⟨X_f, u⟩ ≥ 0 ∀f} must be {0}.
    if let Some(direction) = recession_direction(&facets, n) {
        return Err(ValidationError::new(vec![Violation::Unbounded {
            direction,
        }]));
    }

    // Exact vertex enumeration over all n-subsets of facets.
    let d = facets.len();
    let mut positions: BTreeSet<Vec<BigRational>> = BTreeSet::new();
    for subset in (0..d).combinations(n) {
        let a: Vec<Vec<BigRational>> = subset
            .iter()
            .map(|&f| {
                facets[f]
                    .x
                    .iter()
                    .map(|c| BigRational::from(c.clone()))
                    .collect()
            })
            .collect();
        let b: Vec<BigRational> = subset.iter().map(|&f| -facets[f].lambda.clone()).collect();
        let Some(xi) = lattice::solve_rational(&a, &b) else {
            continue;
        };
        let feasible = (0..d).all(|f| !slack_at(&facets[f], &xi).is_negative());
        if feasible {
            positions.insert(xi);
        }
    }
    if positions.is_empty() {
        return Err(ValidationError::new(vec![
            Violation::EmptyOrLowerDimensional {
                detail: "no vertex satisfies all facet inequalities".to_string(),
            },
        ]));
    }

    // Equality sets, and full-dimensionality via the vertex barycenter: a
    // facet tight at the barycenter contains every vertex, so the polytope
    // lies in its hyperplane.
    let positions: Vec<Vec<BigRational>> = positions.into_iter().collect();
    let count = BigRational::from(BigInt::from(positions.len() as i64));
    let mut barycenter = vec![BigRational::zero(); n];
    for pos in &positions {
        for (b, c) in barycenter.iter_mut().zip(pos) {
            *b += c;
        }
    }
    for b in barycenter.iter_mut() {
        *b /= &count;
    }
    for facet in &facets {
        if slack_at(facet, &barycenter).is_zero() {
            return Err(ValidationError::new(vec![
                Violation::EmptyOrLowerDimensional {
                    detail: format!("every vertex lies on facet `{}`", facet.id),
                },
            ]));
        }
    }

    // Simplicity and unimodularity at every vertex; facet coverage.
    let mut equality_sets: Vec<Vec<usize>> = Vec::with_capacity(positions.len());
    let mut covered = vec![false; d];
    for pos in &positions {
        let set: Vec<usize> = (0..d)
            .filter(|&f| slack_at(&facets[f], pos).is_zero())
            .collect();
        for &f in &set {
            covered[f] = true;
        }
        if set.len() != n {
            violations.push(Violation::NonUnimodularVertex {
                position: pos.clone(),
                facet_set: set.iter().map(|&f| facets[f].id.clone()).collect(),
                det: BigInt::zero(),
            });
        } else {
            let columns: Vec<Vec<BigInt>> = set.iter().map(|&f| facets[f].x.clone()).collect();
            let rows: Vec<Vec<BigInt>> = (0..n)
                .map(|i| columns.iter().map(|c| c[i].clone()).collect())
                .collect();
            let det = lattice::det(&rows);
            if !det.abs().is_one() {
                violations.push(Violation::NonUnimodularVertex {
                    position: pos.clone(),
                    facet_set: set.iter().map(|&f| facets[f].id.clone()).collect(),
                    det,
                });
            }
        }
        equality_sets.push(set);
    }
    for (f, facet) in facets.iter().enumerate() {
        if !covered[f] {
            violations.push(Violation::RedundantFacet {
                facet: facet.id.clone(),
            });
        }
    }
    if !violations.is_empty() {
        return Err(ValidationError::new(violations));
    }

    // Valid: order vertices lexicographically by their sorted facet-id
    // lists (facet indices are already in id order) and assign ids.
    let mut order: Vec<usize> = (0..positions.len()).collect();
    let id_list = |k: usize| -> Vec<&str> {
        equality_sets[k]
            .iter()
            .map(|&f| facets[f].id.as_str())
            .collect()
    };
    order.sort_by(|&a, &b| id_list(a).cmp(&id_list(b)));

    let mut vertices = Vec::with_capacity(order.len());
    let mut charts = Vec::with_capacity(order.len());
    for (rank, &k) in order.iter().enumerate() {
        let basis = equality_sets[k].clone();
        let excluded: Vec<usize> = (0..d).filter(|f| !basis.contains(f)).collect();
        let columns: Vec<Vec<BigInt>> = basis.iter().map(|&f| facets[f].x.clone()).collect();
        let inv_b =
            lattice::unimodular_inverse(&columns).expect("validated vertex basis is unimodular");
        // (Bᵀ)⁻¹ = (B⁻¹)ᵀ, stored as exact-integer doubles.
        let inv_bt: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|kk| inv_b[kk][i].to_f64().expect("inverse entry fits in f64"))
                    .collect()
            })
            .collect();
        let excluded_coeffs: Vec<Vec<i64>> = excluded
            .iter()
            .map(|&fp| {
                lattice::base_change_coeffs(&columns, &facets[fp].x)
                    .expect("validated vertex basis is unimodular")
                    .into_iter()
                    .map(|c| i64::try_from(c).expect("base-change coefficient fits in i64"))
                    .collect()
            })
            .collect();
        let position = positions[k].clone();
        let position_f64: Vec<f64> = position
            .iter()
            .map(|c| c.to_f64().expect("vertex coordinate fits in f64"))
            .collect();
        vertices.push(Vertex {
            id: format!("v{rank}"),
            position,
            facet_set: basis.iter().map(|&f| facets[f].id.clone()).collect(),
        });
        charts.push(ChartCache {
            basis,
            excluded,
            inv_bt,
            excluded_coeffs,
            position_f64,
        });
    }

    // Base-change tables for every ordered vertex pair, with the build-time
    // consistency check: a facet common to both vertex bases must expand as
    // the Kronecker delta row (its own unit coefficient vector).
    let vcount = vertices.len();
    let mut base_changes = Vec::with_capacity(vcount);
    for vi in 0..vcount {
        let mut per_target = Vec::with_capacity(vcount);
        for wi in 0..vcount {
            let target_columns: Vec<Vec<BigInt>> = charts[wi]
                .basis
                .iter()
                .map(|&f| facets[f].x.clone())
                .collect();
            let mut matrix = Vec::with_capacity(n);
            for &f in &charts[vi].basis {
                let coeffs: Vec<i64> = lattice::base_change_coeffs(&target_columns, &facets[f].x)
                    .expect("validated vertex basis is unimodular")
                    .into_iter()
                    .map(|c| i64::try_from(c).expect("base-change coefficient fits in i64"))
                    .collect();
                if let Some(c) = charts[wi].basis.iter().position(|&g| g == f) {
                    // Shared facet: the expansion of X_f in a basis containing
                    // X_f itself must be the unit row, or the exact solver is
                    // broken.
                    assert!(
                        coeffs
                            .iter()
                            .enumerate()
                            .all(|(j, &e)| e == i64::from(j == c)),
                        "base change of shared facet `{}` between `{}` and `{}` is not a unit row",
                        facets[f].id,
                        vertices[vi].id,
                        vertices[wi].id,
                    );
                }
                matrix.push(coeffs);
            }
            per_target.push(matrix);
        }
        base_changes.push(per_target);
    }

    let normals_f64: Vec<Vec<f64>> = facets
        .iter()
        .map(|f| {
            f.x.iter()
                .map(|c| c.to_f64().expect("normal entry fits in f64"))
                .collect()
        })
        .collect();
    let lambda_f64: Vec<f64> = facets
        .iter()
        .map(|f| f.lambda.to_f64().expect("offset fits in f64"))
        .collect();
    let barycenter_f64: Vec<f64> = barycenter
        .iter()
        .map(|c| c.to_f64().expect("barycenter fits in f64"))
        .collect();
    let inradius_proxy = facets
        .iter()
        .map(|f| slack_at(f, &barycenter).to_f64().expect("slack fits in f64"))
        .fold(f64::INFINITY, f64::min);

    let facet_index = facets
        .iter()
        .enumerate()
        .map(|(i, f)| (f.id.clone(), i))
        .collect();
    let vertex_index = vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (v.id.clone(), i))
        .collect();

    Ok(DelzantPolytope {
        dim: n,
        facets,
        vertices,
        facet_index,
        vertex_index,
        charts,
        base_changes,
        normals_f64,
        lambda_f64,
        barycenter,
        barycenter_f64,
        inradius_proxy,
    })
}

fn slack_at(facet: &Facet, xi: &[BigRational]) -> BigRational {
    let mut s = facet.lambda.clone();
    for (a, b) in facet.x.iter().zip(xi) {
        s += BigRational::from(a.clone()) * b;
    }
    s
}

/// Finds a nonzero integer direction in the recession cone
/// `{u : ⟨X_f, u⟩ ≥ 0 ∀f}`, or `None` when the cone is `{0}` (bounded).
///
/// If the normals span a proper subspace the cone contains a full line
/// (any kernel direction of the normal matrix). Otherwise the cone is
/// pointed, so if nonzero it has an extreme ray, and every extreme ray is
/// the kernel direction of some `n−1` linearly independent normals — all
/// enumerable exactly.
fn recession_direction(facets: &[Facet], n: usize) -> Option<Vec<BigInt>> {
    let rows: Vec<Vec<BigInt>> = facets.iter().map(|f| f.x.clone()).collect();
    if lattice::rank(&rows, n) < n {
        let kernel = lattice::integer_kernel(&rows, n);
        return kernel.into_iter().next();
    }
    let feasible = |u: &[BigInt]| -> bool {
        facets.iter().all(|f| {
            let dot: BigInt = f.x.iter().zip(u).map(|(a, b)| a * b).sum();
            !dot.is_negative()
        })
    };
    for subset in (0..facets.len()).combinations(n - 1) {
        let sub_rows: Vec<Vec<BigInt>> = subset.iter().map(|&f| rows[f].clone()).collect();
        let kernel = lattice::integer_kernel(&sub_rows, n);
        if kernel.len() != 1 {
            continue; // not a rank-(n−1) subset: no single ray direction
        }
        let u = &kernel[0];
        if feasible(u) {
            return Some(u.clone());
        }
        let neg: Vec<BigInt> = u.iter().map(|c| -c.clone()).collect();
        if feasible(&neg) {
            return Some(neg);
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Example families
// ---------------------------------------------------------------------------

/// The standard projective simplex in dimension `n`: facets `f1, …, fn`
/// with normals `e_i` and `f0` with normal `−Σ e_i`, offsets `lambda[0..=n]`.
/// Nonempty interior iff `γ = Σ λ_i > 0`.
pub fn simplex(n: usize, lambda: &[BigRational]) -> Result<DelzantPolytope, ValidationError> {
    if n == 0 {
        return Err(ValidationError::new(vec![Violation::InvalidDimension]));
    }
    assert_eq!(
        lambda.len(),
        n + 1,
        "simplex in dimension {n} takes {} offsets",
        n + 1
    );
    let gamma: BigRational = lambda.iter().sum();
    if !gamma.is_positive() {
        return Err(ValidationError::new(vec![
            Violation::EmptyOrLowerDimensional {
                detail: format!("offset sum γ = {gamma} must be positive"),
            },
        ]));
    }
    let mut facets = Vec::with_capacity(n + 1);
    facets.push(Facet::new(
        "f0",
        vec![BigInt::from(-1); n],
        lambda[0].clone(),
    ));
    for i in 1..=n {
        let mut x = vec![BigInt::zero(); n];
        x[i - 1] = BigInt::one();
        facets.push(Facet::new(format!("f{i}"), x, lambda[i].clone()));
    }
    build(n, facets)
}

/// The Hirzebruch quadrangle with twist `m ≥ 0`: normals `e₁`, `e₂`,
/// `−e₁ + m·e₂`, `−e₂` on facets `f1..f4` with offsets `lambda[0..4]`
/// for `(λ₁, λ₂, λ₃, λ₄)`.
///
/// The presentation is a valid quadrangle iff the bottom edge length
/// `λ₁ + λ₃ − m·λ₂` and the height `λ₂ + λ₄` are both positive (the top
/// edge length `λ₁ + λ₃ + m·λ₄` is then automatically positive).
pub fn hirzebruch(m: u32, lambda: &[BigRational; 4]) -> Result<DelzantPolytope, ValidationError> {
    let m_big = BigInt::from(m);
    let bottom = &lambda[0] + &lambda[2] - BigRational::from(m_big.clone()) * &lambda[1];
    let height = &lambda[1] + &lambda[3];
    let mut problems = Vec::new();
    if !bottom.is_positive() {
        problems.push(format!(
            "bottom edge length λ1+λ3−m·λ2 = {bottom} is not positive"
        ));
    }
    if !height.is_positive() {
        problems.push(format!("height λ2+λ4 = {height} is not positive"));
    }
    if !problems.is_empty() {
        return Err(ValidationError::new(vec![
            Violation::EmptyOrLowerDimensional {
                detail: problems.join("; "),
            },
        ]));
    }
    let facets = vec![
        Facet::new("f1", vec![BigInt::one(), BigInt::zero()], lambda[0].clone()),
        Facet::new("f2", vec![BigInt::zero(), BigInt::one()], lambda[1].clone()),
        Facet::new("f3", vec![BigInt::from(-1), m_big], lambda[2].clone()),
        Facet::new("f4", vec![BigInt::zero(), BigInt::from(-1)], lambda[3].clone()),
    ];
    build(2, facets)
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

/// Errors while reading a polytope or point file. These are format
/// problems — structurally invalid polytopes are reported separately by
/// [`ValidationError`] after a successful parse.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

impl FormatError {
    pub(crate) fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        FormatError::Invalid {
            path: path.into(),
            message: message.into(),
        }
    }
}

/// Parses a rational from either a JSON integer or a `"p/q"` / `"p"` string.
pub(crate) fn parse_rational(value: &serde_json::Value, path: &str) -> Result<BigRational, FormatError> {
    match value {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigRational::from(BigInt::from(i)))
            } else {
                Err(FormatError::invalid(
                    path,
                    "expected an integer or a \"p/q\" string (non-integer or oversized number)",
                ))
            }
        }
        serde_json::Value::String(s) => {
            let (num, den) = match s.split_once('/') {
                Some((p, q)) => (p, q),
                None => (s.as_str(), "1"),
            };
            let num = BigInt::from_str(num.trim()).map_err(|e| {
                FormatError::invalid(path, format!("bad numerator `{num}`: {e}"))
            })?;
            let den = BigInt::from_str(den.trim()).map_err(|e| {
                FormatError::invalid(path, format!("bad denominator `{den}`: {e}"))
            })?;
            if den.is_zero() {
                return Err(FormatError::invalid(path, "denominator is zero"));
            }
            Ok(BigRational::new(num, den))
        }
        _ => Err(FormatError::invalid(
            path,
            "expected an integer or a \"p/q\" string",
        )),
    }
}

/// Formats a rational canonically: a bare integer when the denominator is 1
/// and the value fits a JSON number, otherwise a `"p/q"` string.
fn rational_to_json(r: &BigRational) -> String {
    if r.denom().is_one() {
        if let Some(i) = r.numer().to_i64() {
            return i.to_string();
        }
        return format!("\"{}\"", r.numer());
    }
    format!("\"{}/{}\"", r.numer(), r.denom())
}

/// Parses the polytope file format: a JSON document
/// `{"dim": n, "facets": [{"id": …, "X": […], "lambda": …}, …]}`.
/// Returns the raw `(dim, facets)` pair; validation is a separate step.
pub fn parse_polytope_file(text: &str) -> Result<(usize, Vec<Facet>), FormatError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| FormatError::Json(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| FormatError::invalid("$", "expected a JSON object"))?;
    for key in obj.keys() {
        if key != "dim" && key != "facets" {
            return Err(FormatError::invalid(
                format!("$.{key}"),
                "unknown key (expected only `dim` and `facets`)",
            ));
        }
    }
    let dim = obj
        .get("dim")
        .ok_or_else(|| FormatError::invalid("$.dim", "missing"))?
        .as_u64()
        .ok_or_else(|| FormatError::invalid("$.dim", "expected a positive integer"))?;
    if dim == 0 {
        return Err(FormatError::invalid("$.dim", "must be at least 1"));
    }
    let facet_values = obj
        .get("facets")
        .ok_or_else(|| FormatError::invalid("$.facets", "missing"))?
        .as_array()
        .ok_or_else(|| FormatError::invalid("$.facets", "expected an array"))?;
    let mut facets = Vec::with_capacity(facet_values.len());
    for (k, fv) in facet_values.iter().enumerate() {
        let path = format!("$.facets[{k}]");
        let fobj = fv
            .as_object()
            .ok_or_else(|| FormatError::invalid(&path, "expected an object"))?;
        for key in fobj.keys() {
            if key != "id" && key != "X" && key != "lambda" {
                return Err(FormatError::invalid(
                    format!("{path}.{key}"),
                    "unknown key (expected only `id`, `X`, `lambda`)",
                ));
            }
        }
        let id = fobj
            .get("id")
            .and_then(|v| v.as_str())
            .ok_or_else(|| FormatError::invalid(format!("{path}.id"), "expected a string"))?;
        let x_vals = fobj
            .get("X")
            .and_then(|v| v.as_array())
            .ok_or_else(|| {
                FormatError::invalid(format!("{path}.X"), "expected an array of integers")
            })?;
        let mut x = Vec::with_capacity(x_vals.len());
        for (j, xv) in x_vals.iter().enumerate() {
            let entry = xv.as_i64().ok_or_else(|| {
                FormatError::invalid(format!("{path}.X[{j}]"), "expected an integer")
            })?;
            x.push(BigInt::from(entry));
        }
        let lambda = parse_rational(
            fobj.get("lambda")
                .ok_or_else(|| FormatError::invalid(format!("{path}.lambda"), "missing"))?,
            &format!("{path}.lambda"),
        )?;
        facets.push(Facet::new(id, x, lambda));
    }
    Ok((dim as usize, facets))
}

/// Emits the canonical polytope file: facets sorted by id, offsets in
/// lowest terms, fixed layout. Parsing the output and re-emitting it is
/// byte-identical.
pub fn canonical_polytope_file(p: &DelzantPolytope) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    out.push_str(&format!("  \"dim\": {},\n", p.dim));
    out.push_str("  \"facets\": [\n");
    for (k, facet) in p.facets.iter().enumerate() {
        let xs = facet.x.iter().map(|c| c.to_string()).join(", ");
        out.push_str(&format!(
            "    {{ \"id\": {}, \"X\": [{}], \"lambda\": {} }}{}\n",
            serde_json::Value::String(facet.id.clone()),
            xs,
            rational_to_json(&facet.lambda),
            if k + 1 < p.facets.len() { "," } else { "" },
        ));
    }
    out.push_str("  ]\n");
    out.push_str("}\n");
    out
}
