//! Delzant polytopes as computable atlases.
//!
//! A Delzant polytope — a convex polytope whose primitive facet normals at
//! each vertex form a ℤ-basis of the integer lattice — determines a compact
//! symplectic toric manifold together with two families of coordinate charts:
//!
//! * **reduced-phase-space charts**: one copy of ℂ^{F_v} per vertex `v`
//!   (indexed by the facets through `v`), carrying the standard symplectic
//!   form, a momentum map `μ_v`, and explicit transition maps `φ_{w,v}`
//!   between overlapping charts;
//! * **toric charts**: the same index sets, glued instead by Laurent-monomial
//!   transition maps with integer exponents.
//!
//! This crate makes every one of those objects computable:
//!
//! * [`lattice`] — exact integer/rational linear algebra: primitivity, a
//!   Hermite-normal-form kernel basis, and exact base-change coefficients.
//! * [`polytope`] — halfspace ingestion, exact vertex enumeration, validation
//!   of the Delzant conditions, the simplex/Hirzebruch example families, base
//!   changes between vertex bases, faces, and a canonical file format.
//! * [`charts`] — momentum maps `μ_v`, radius functions `r_f`, chart-domain
//!   membership, the section `s_v` into the momentum level set, level-set
//!   membership, strata, and the torus action in chart coordinates.
//! * [`transitions`] — the symplectic transitions `φ_{w,v}`, the toric Laurent
//!   transitions, the chart-wise symplectic↔toric maps `θ_v` and `θ_v⁻¹`
//!   (a damped Newton solve), the toric momentum map, and closed forms for
//!   projective space and Hirzebruch surfaces.
//! * [`verify`] — a seeded, reproducible property harness that samples chart
//!   points and certifies the transition identities (cocycle, momentum
//!   compatibility, symplecticity, intertwining, equivariance, …) at
//!   configurable sample counts, emitting machine-readable reports.
//!
//! All combinatorial and lattice data are exact (arbitrary-precision integers
//! and rationals); chart evaluation converts to `f64` only at the boundary.

pub mod charts;
pub mod lattice;
pub mod polytope;
pub mod transitions;
pub mod verify;

pub use charts::{AmbientPoint, AngleVector, ChartPoint, MomentumValue};
pub use polytope::{BaseChange, DelzantPolytope, Facet, FaceId, ValidationError, Vertex, Violation};
pub use transitions::{LaurentMap, SolverConfig};
pub use verify::{CheckReport, SampleConfig};

/// Default tolerance for all floating-point membership predicates.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Errors raised by chart evaluation and coordinate transitions.
///
/// Structural defects of the polytope itself are reported separately by
/// [`polytope::ValidationError`] at build time; this enum covers run-time
/// evaluation of maps on an already-valid polytope.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unknown vertex id `{0}`")]
    UnknownVertex(String),
    #[error("unknown facet id `{0}`")]
    UnknownFacet(String),
    #[error("point belongs to chart `{got}`, expected chart `{expected}`")]
    WrongChart { expected: String, got: String },
    #[error("point has {got} coordinates, expected {expected}")]
    CoordinateCountMismatch { expected: usize, got: usize },
    #[error("vector has length {got}, expected ambient dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point lies outside the polytope: facet `{facet}` has slack {slack:.3e}")]
    PointOutsideDelta { facet: String, slack: f64 },
    #[error("point lies outside the chart domain: {0}")]
    OutsideChartDomain(String),
    #[error("coordinate `{facet}` vanishes but carries a negative exponent")]
    ZeroAtNegativeExponent { facet: String },
    #[error("solver failed to converge after {iterations} iterations (residual {residual:.3e})")]
    ConvergenceFailure { iterations: usize, residual: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("sampling region is empty (margin too large for this polytope)")]
    EmptySamplingRegion,
}

/// Formats a double with 17 significant digits, enough to round-trip any
/// `f64` bit pattern through text. Negative zero is normalized to zero so
/// that equal values print identically.
pub fn fmt_f64(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}
