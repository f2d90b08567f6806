//! The reduced-phase-space chart family.
//!
//! For each vertex `v` of a validated polytope there is a chart on `ℂ^{F_v}`:
//! [`mu_v`] solves the unimodular linear system `|z_f|²/2 − λ_f = ⟨X_f, ξ⟩`
//! (f ∈ F_v) for the momentum value `ξ`, [`r_f`] recovers the radial
//! coordinate of any facet from `ξ`, [`in_u_v`] tests chart-domain
//! membership, and [`section_s_v`] completes a chart point to the ambient
//! level-set point with positive real entries on the remaining facets.
//! [`in_z`] decides level-set membership of an ambient point, [`stratum_of`]
//! classifies the vanishing pattern of a chart point, and [`act`] applies
//! the per-chart torus action.
//!
//! All maps are pure functions over an immutable [`DelzantPolytope`]; the
//! per-vertex exact integer inverses they rely on are precomputed at
//! polytope construction.

use num_complex::Complex64;

use crate::polytope::{DelzantPolytope, FaceId, FormatError};
use crate::Error;

/// A point of the chart at one vertex: one complex coordinate per facet of
/// `F_v`, stored in the fixed chart order (ascending facet id).
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    vertex: String,
    coords: Vec<Complex64>,
}

impl ChartPoint {
    pub fn new(vertex: impl Into<String>, coords: Vec<Complex64>) -> Self {
        ChartPoint {
            vertex: vertex.into(),
            coords,
        }
    }

    /// The origin of the chart at `v` (the fixed point mapping to the vertex).
    pub fn zero(p: &DelzantPolytope, v: &str) -> Result<Self, Error> {
        p.vertex_idx(v)?;
        Ok(ChartPoint {
            vertex: v.to_string(),
            coords: vec![Complex64::new(0.0, 0.0); p.dim()],
        })
    }

    pub fn vertex(&self) -> &str {
        &self.vertex
    }

    /// Coordinates in the chart's facet order.
    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }
}

/// An ambient point: one complex coordinate per facet of the polytope, in
/// canonical (ascending facet id) order.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientPoint {
    coords: Vec<Complex64>,
}

impl AmbientPoint {
    pub fn new(coords: Vec<Complex64>) -> Self {
        AmbientPoint { coords }
    }

    /// Coordinates keyed by the polytope's facet order.
    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    /// Coordinate of a named facet.
    pub fn coord(&self, p: &DelzantPolytope, facet: &str) -> Result<Complex64, Error> {
        Ok(self.coords[p.facet_idx(facet)?])
    }
}

/// A momentum value `ξ` in the fixed dual-lattice coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumValue {
    xi: Vec<f64>,
}

impl MomentumValue {
    pub fn new(xi: Vec<f64>) -> Self {
        MomentumValue { xi }
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }
}

/// A torus element in the chart at one vertex: one angle (mod 1) per facet
/// of `F_v`, in chart order.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleVector {
    vertex: String,
    angles: Vec<f64>,
}

impl AngleVector {
    pub fn new(vertex: impl Into<String>, angles: Vec<f64>) -> Self {
        AngleVector {
            vertex: vertex.into(),
            angles,
        }
    }

    pub fn vertex(&self) -> &str {
        &self.vertex
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }
}

/// Checks that `z` is a point of the chart at `v` and returns the vertex
/// index.
pub(crate) fn checked_chart(
    p: &DelzantPolytope,
    v: &str,
    z: &ChartPoint,
) -> Result<usize, Error> {
    let vi = p.vertex_idx(v)?;
    if z.vertex != v {
        return Err(Error::WrongChart {
            expected: v.to_string(),
            got: z.vertex.clone(),
        });
    }
    if z.coords.len() != p.dim() {
        return Err(Error::CoordinateCountMismatch {
            expected: p.dim(),
            got: z.coords.len(),
        });
    }
    Ok(vi)
}

/// The chart momentum map: the unique `ξ` with `|z_f|²/2 − λ_f = ⟨X_f, ξ⟩`
/// for every `f ∈ F_v`. Solved by the precomputed exact integer inverse of
/// the unimodular basis matrix applied to the double-precision right-hand
/// side, so no factorization error enters.
///
/// # Errors
/// Unknown vertex, wrong chart, or coordinate count mismatch.
pub fn mu_v(p: &DelzantPolytope, v: &str, z: &ChartPoint) -> Result<MomentumValue, Error> {
    let vi = checked_chart(p, v, z)?;
    Ok(mu_v_unchecked(p, vi, z.coords()))
}

pub(crate) fn mu_v_unchecked(p: &DelzantPolytope, vi: usize, coords: &[Complex64]) -> MomentumValue {
    let chart = p.chart(vi);
    let n = p.dim();
    let rhs: Vec<f64> = chart
        .basis
        .iter()
        .zip(coords)
        .map(|(&f, z)| 0.5 * z.norm_sqr() - p.lambda_f64(f))
        .collect();
    let xi: Vec<f64> = (0..n)
        .map(|i| {
            chart.inv_bt[i]
                .iter()
                .zip(&rhs)
                .map(|(a, b)| a * b)
                .sum::<f64>()
        })
        .collect();
    MomentumValue::new(xi)
}

/// The radial coordinate of facet `f` at a momentum value:
/// `√(2(⟨X_f, ξ⟩ + λ_f))`, clamped to 0 when the argument lies within `tol`
/// of zero so boundary points round-trip.
///
/// # Errors
/// [`Error::PointOutsideDelta`] when the argument is below `−tol`;
/// unknown facet; dimension mismatch.
pub fn r_f(p: &DelzantPolytope, facet: &str, xi: &MomentumValue, tol: f64) -> Result<f64, Error> {
    let fi = p.facet_idx(facet)?;
    if xi.xi.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: xi.xi.len(),
        });
    }
    r_f_unchecked(p, fi, xi.xi(), tol)
}

pub(crate) fn r_f_unchecked(
    p: &DelzantPolytope,
    facet_idx: usize,
    xi: &[f64],
    tol: f64,
) -> Result<f64, Error> {
    let slack = p.slack_f64(facet_idx, xi);
    if slack < -tol {
        return Err(Error::PointOutsideDelta {
            facet: p.facets()[facet_idx].id().to_string(),
            slack,
        });
    }
    if slack <= 0.0 {
        return Ok(0.0);
    }
    Ok((2.0 * slack).sqrt())
}

/// Chart-domain membership: `μ_v(z)` must satisfy every facet inequality
/// within `tol`, strictly (slack > `tol`) on the facets not through `v`.
///
/// # Errors
/// Unknown vertex, wrong chart, or coordinate count mismatch.
pub fn in_u_v(p: &DelzantPolytope, v: &str, z: &ChartPoint, tol: f64) -> Result<bool, Error> {
    let vi = checked_chart(p, v, z)?;
    let xi = mu_v_unchecked(p, vi, z.coords());
    Ok(in_u_v_at(p, vi, xi.xi(), tol))
}

pub(crate) fn in_u_v_at(p: &DelzantPolytope, vi: usize, xi: &[f64], tol: f64) -> bool {
    let chart = p.chart(vi);
    chart
        .basis
        .iter()
        .all(|&f| p.slack_f64(f, xi) >= -tol)
        && chart.excluded.iter().all(|&f| p.slack_f64(f, xi) > tol)
}

/// The section into the level set: keeps `z` bit-for-bit on `F_v` and fills
/// every other facet coordinate with the nonnegative real `r_{f′}(μ_v(z))`.
/// Accepts the closed domain `μ_v(z) ∈ Δ` (not only the open chart domain),
/// so boundary points extend continuously.
///
/// # Errors
/// [`Error::PointOutsideDelta`] when `μ_v(z)` leaves the polytope by more
/// than `tol`; chart mismatches as in [`mu_v`].
pub fn section_s_v(
    p: &DelzantPolytope,
    v: &str,
    z: &ChartPoint,
    tol: f64,
) -> Result<AmbientPoint, Error> {
    let vi = checked_chart(p, v, z)?;
    let xi = mu_v_unchecked(p, vi, z.coords());
    let chart = p.chart(vi);
    let mut coords = vec![Complex64::new(0.0, 0.0); p.facets().len()];
    for (&f, &zf) in chart.basis.iter().zip(z.coords()) {
        coords[f] = zf;
    }
    for &f in &chart.excluded {
        let r = r_f_unchecked(p, f, xi.xi(), tol)?;
        coords[f] = Complex64::new(r, 0.0);
    }
    Ok(AmbientPoint { coords })
}

/// Level-set membership of an ambient point: decides whether some `ξ`
/// satisfies `|z_f|²/2 − λ_f = ⟨X_f, ξ⟩` for every facet, within `tol`
/// per equation. The candidate `ξ` is solved from the equations of one
/// vertex basis and the remaining residuals are verified.
///
/// Returns the momentum value when the point lies on the level set, `None`
/// otherwise.
///
/// # Errors
/// Coordinate count mismatch.
pub fn in_z(
    p: &DelzantPolytope,
    z: &AmbientPoint,
    tol: f64,
) -> Result<Option<MomentumValue>, Error> {
    let d = p.facets().len();
    if z.coords.len() != d {
        return Err(Error::CoordinateCountMismatch {
            expected: d,
            got: z.coords.len(),
        });
    }
    // Solve the n equations of the first vertex basis, then verify all d.
    let chart = p.chart(0);
    let n = p.dim();
    let rhs: Vec<f64> = chart
        .basis
        .iter()
        .map(|&f| 0.5 * z.coords[f].norm_sqr() - p.lambda_f64(f))
        .collect();
    let xi: Vec<f64> = (0..n)
        .map(|i| {
            chart.inv_bt[i]
                .iter()
                .zip(&rhs)
                .map(|(a, b)| a * b)
                .sum::<f64>()
        })
        .collect();
    for f in 0..d {
        // |z_f|²/2 − λ_f − ⟨X_f, ξ⟩ = |z_f|²/2 − slack_f(ξ).
        let res = 0.5 * z.coords[f].norm_sqr() - p.slack_f64(f, &xi);
        if res.abs() > tol {
            return Ok(None);
        }
    }
    Ok(Some(MomentumValue::new(xi)))
}

/// The stratum of a chart point: the face id collecting the facets of `F_v`
/// whose coordinate vanishes (`|z_f| < tol`). On the chart domain this
/// agrees with the face of the polytope containing `μ_v(z)`.
///
/// # Errors
/// Chart mismatches as in [`mu_v`].
pub fn stratum_of(
    p: &DelzantPolytope,
    v: &str,
    z: &ChartPoint,
    tol: f64,
) -> Result<FaceId, Error> {
    let vi = checked_chart(p, v, z)?;
    let chart = p.chart(vi);
    let ids: Vec<String> = chart
        .basis
        .iter()
        .zip(z.coords())
        .filter(|(_, zf)| zf.norm() < tol)
        .map(|(&f, _)| p.facets()[f].id().to_string())
        .collect();
    Ok(FaceId::new(ids))
}

/// The torus action in chart coordinates: rotates each coordinate by its
/// angle, `(a·z)_f = e^{2πi a_f} z_f`.
///
/// # Errors
/// [`Error::WrongChart`] when the angle vector and point belong to
/// different charts; coordinate count mismatch.
pub fn act(a: &AngleVector, z: &ChartPoint) -> Result<ChartPoint, Error> {
    if a.vertex != z.vertex {
        return Err(Error::WrongChart {
            expected: z.vertex.clone(),
            got: a.vertex.clone(),
        });
    }
    if a.angles.len() != z.coords.len() {
        return Err(Error::CoordinateCountMismatch {
            expected: z.coords.len(),
            got: a.angles.len(),
        });
    }
    let coords = a
        .angles
        .iter()
        .zip(&z.coords)
        .map(|(&af, &zf)| Complex64::from_polar(1.0, std::f64::consts::TAU * af) * zf)
        .collect();
    Ok(ChartPoint {
        vertex: z.vertex.clone(),
        coords,
    })
}

// ---------------------------------------------------------------------------
// Point file formats
// ---------------------------------------------------------------------------

fn complex_json(z: Complex64) -> String {
    format!("[{}, {}]", crate::fmt_f64(z.re), crate::fmt_f64(z.im))
}

/// Serializes a chart point as
/// `{"vertex": "...", "coords": {"f0": [re, im], ...}}` with the chart's
/// facet order preserved.
pub fn chart_point_json(p: &DelzantPolytope, z: &ChartPoint) -> String {
    let vi = p
        .vertex_idx(&z.vertex)
        .expect("chart point belongs to this polytope");
    let chart = p.chart(vi);
    let entries = chart
        .basis
        .iter()
        .zip(&z.coords)
        .map(|(&f, &zf)| {
            format!(
                "{}: {}",
                serde_json::Value::String(p.facets()[f].id().to_string()),
                complex_json(zf)
            )
        })
        .collect::<Vec<_>>()
        .join(", ");
    format!(
        "{{\"vertex\": {}, \"coords\": {{{entries}}}}}",
        serde_json::Value::String(z.vertex.clone())
    )
}

/// Serializes an ambient point as `{"coords": {facet: [re, im], ...}}` over
/// every facet in canonical order.
pub fn ambient_point_json(p: &DelzantPolytope, z: &AmbientPoint) -> String {
    let entries = p
        .facets()
        .iter()
        .zip(&z.coords)
        .map(|(f, &zf)| {
            format!(
                "{}: {}",
                serde_json::Value::String(f.id().to_string()),
                complex_json(zf)
            )
        })
        .collect::<Vec<_>>()
        .join(", ");
    format!("{{\"coords\": {{{entries}}}}}")
}

/// Serializes a momentum value as `{"xi": [...]}`.
pub fn momentum_json(m: &MomentumValue) -> String {
    let entries = m
        .xi
        .iter()
        .map(|&x| crate::fmt_f64(x))
        .collect::<Vec<_>>()
        .join(", ");
    format!("{{\"xi\": [{entries}]}}")
}

fn parse_complex(value: &serde_json::Value, path: &str) -> Result<Complex64, FormatError> {
    let arr = value
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| FormatError::invalid(path, "expected [re, im]"))?;
    let re = arr[0]
        .as_f64()
        .ok_or_else(|| FormatError::invalid(format!("{path}[0]"), "expected a number"))?;
    let im = arr[1]
        .as_f64()
        .ok_or_else(|| FormatError::invalid(format!("{path}[1]"), "expected a number"))?;
    Ok(Complex64::new(re, im))
}

fn coords_object<'a>(
    value: &'a serde_json::Value,
    allowed_keys: &[&str],
) -> Result<&'a serde_json::Map<String, serde_json::Value>, FormatError> {
    let obj = value
        .as_object()
        .ok_or_else(|| FormatError::invalid("$", "expected a JSON object"))?;
    for key in obj.keys() {
        if !allowed_keys.contains(&key.as_str()) {
            return Err(FormatError::invalid(
                format!("$.{key}"),
                format!("unknown key (expected {})", allowed_keys.join(", ")),
            ));
        }
    }
    Ok(obj)
}

/// Parses a chart point file against a polytope: the `coords` key set must
/// equal `F_v` exactly.
pub fn parse_chart_point(p: &DelzantPolytope, text: &str) -> Result<ChartPoint, FormatError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| FormatError::Json(e.to_string()))?;
    let obj = coords_object(&value, &["vertex", "coords"])?;
    let vertex = obj
        .get("vertex")
        .and_then(|v| v.as_str())
        .ok_or_else(|| FormatError::invalid("$.vertex", "expected a vertex id string"))?;
    let vi = p
        .vertex_idx(vertex)
        .map_err(|_| FormatError::invalid("$.vertex", format!("unknown vertex `{vertex}`")))?;
    let coords = obj
        .get("coords")
        .and_then(|v| v.as_object())
        .ok_or_else(|| FormatError::invalid("$.coords", "expected an object"))?;
    let facet_set = p.vertices()[vi].facet_set();
    if coords.len() != facet_set.len() {
        return Err(FormatError::invalid(
            "$.coords",
            format!(
                "expected exactly the facets of `{vertex}` ({}), got {} keys",
                facet_set.join(", "),
                coords.len()
            ),
        ));
    }
    let mut out = Vec::with_capacity(facet_set.len());
    for f in facet_set {
        let v = coords.get(f).ok_or_else(|| {
            FormatError::invalid("$.coords", format!("missing facet `{f}` of vertex `{vertex}`"))
        })?;
        out.push(parse_complex(v, &format!("$.coords.{f}"))?);
    }
    Ok(ChartPoint::new(vertex, out))
}

/// Parses an ambient point file against a polytope: the `coords` key set
/// must equal the full facet set.
pub fn parse_ambient_point(p: &DelzantPolytope, text: &str) -> Result<AmbientPoint, FormatError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| FormatError::Json(e.to_string()))?;
    let obj = coords_object(&value, &["coords"])?;
    let coords = obj
        .get("coords")
        .and_then(|v| v.as_object())
        .ok_or_else(|| FormatError::invalid("$.coords", "expected an object"))?;
    if coords.len() != p.facets().len() {
        return Err(FormatError::invalid(
            "$.coords",
            format!(
                "expected all {} facets, got {} keys",
                p.facets().len(),
                coords.len()
            ),
        ));
    }
    let mut out = Vec::with_capacity(p.facets().len());
    for f in p.facets() {
        let v = coords.get(f.id()).ok_or_else(|| {
            FormatError::invalid("$.coords", format!("missing facet `{}`", f.id()))
        })?;
        out.push(parse_complex(v, &format!("$.coords.{}", f.id()))?);
    }
    Ok(AmbientPoint::new(out))
}

/// Parses a momentum value file `{"xi": [...]}` of the expected dimension.
pub fn parse_momentum(text: &str, n: usize) -> Result<MomentumValue, FormatError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| FormatError::Json(e.to_string()))?;
    let obj = coords_object(&value, &["xi"])?;
    let arr = obj
        .get("xi")
        .and_then(|v| v.as_array())
        .ok_or_else(|| FormatError::invalid("$.xi", "expected an array of numbers"))?;
    if arr.len() != n {
        return Err(FormatError::invalid(
            "$.xi",
            format!("expected {n} entries, got {}", arr.len()),
        ));
    }
    let mut xi = Vec::with_capacity(n);
    for (i, v) in arr.iter().enumerate() {
        xi.push(
            v.as_f64()
                .ok_or_else(|| FormatError::invalid(format!("$.xi[{i}]"), "expected a number"))?,
        );
    }
    Ok(MomentumValue::new(xi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{build, simplex, Facet};
    use crate::DEFAULT_TOL;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::ToPrimitive;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Segment [−1/2, 1/2]: facets f0 (X=−1, λ=1/2) and f1 (X=1, λ=1/2).
    fn segment() -> DelzantPolytope {
        simplex(1, &[rat(1, 2), rat(1, 2)]).unwrap()
    }

    /// Projective-plane simplex with offsets (1, 0, 0); the vertex at the
    /// origin carries facets {f1, f2} and is `v2` in id order.
    fn plane_simplex() -> DelzantPolytope {
        simplex(2, &[rat(1, 1), rat(0, 1), rat(0, 1)]).unwrap()
    }

    #[test]
    fn momentum_map_fixes_the_vertex() {
        // z = 0 must reproduce the vertex position for every chart.
        for p in [
            segment(),
            plane_simplex(),
            crate::polytope::hirzebruch(1, &[rat(1, 1), rat(1, 1), rat(1, 1), rat(1, 1)]).unwrap(),
        ] {
            for v in p.vertices() {
                let z = ChartPoint::zero(&p, v.id()).unwrap();
                let xi = mu_v(&p, v.id(), &z).unwrap();
                for (got, want) in xi.xi().iter().zip(v.position()) {
                    let want = want.to_f64().unwrap();
                    assert!(
                        (got - want).abs() <= 1e-14,
                        "mu_{}(0) component {got} != {want}",
                        v.id()
                    );
                }
            }
        }
    }

    #[test]
    fn momentum_map_on_segment_and_plane() {
        // Segment, vertex at −1/2 (facet f1, normal +1): |1|²/2 − 1/2 = 0.
        let p = segment();
        let z = ChartPoint::new("v1", vec![c(1.0, 0.0)]);
        assert_eq!(mu_v(&p, "v1", &z).unwrap().xi(), &[0.0]);

        // Plane simplex, origin vertex: coordinatewise |z_i|²/2.
        let p = plane_simplex();
        let z = ChartPoint::new("v2", vec![c(0.5, 0.0), c(0.5, 0.0)]);
        assert_eq!(mu_v(&p, "v2", &z).unwrap().xi(), &[0.125, 0.125]);
    }

    #[test]
    fn radius_evaluates_clamps_and_rejects() {
        let p = segment();
        // At the vertex carried by f1, the opposite radius is √2.
        let xi = MomentumValue::new(vec![-0.5]);
        let r = r_f(&p, "f0", &xi, DEFAULT_TOL).unwrap();
        assert!((r - 2.0_f64.sqrt()).abs() < 1e-15);
        // On its own facet the radius vanishes.
        assert_eq!(r_f(&p, "f1", &xi, DEFAULT_TOL).unwrap(), 0.0);
        // Tiny negative slack clamps to zero…
        let xi = MomentumValue::new(vec![-0.5 - 1e-12]);
        assert_eq!(r_f(&p, "f1", &xi, DEFAULT_TOL).unwrap(), 0.0);
        // …but a real violation errors.
        let xi = MomentumValue::new(vec![-1.5]);
        assert!(matches!(
            r_f(&p, "f1", &xi, DEFAULT_TOL),
            Err(Error::PointOutsideDelta { .. })
        ));
    }

    #[test]
    fn chart_domain_membership() {
        let p = segment();
        let zero = ChartPoint::zero(&p, "v1").unwrap();
        assert!(in_u_v(&p, "v1", &zero, DEFAULT_TOL).unwrap());
        // |z| = 1 keeps μ at the interior point 0.
        let z = ChartPoint::new("v1", vec![c(1.0, 0.0)]);
        assert!(in_u_v(&p, "v1", &z, DEFAULT_TOL).unwrap());
        // |z| = √2 lands exactly on the opposite facet: excluded, so out.
        let z = ChartPoint::new("v1", vec![c(2.0_f64.sqrt(), 0.0)]);
        assert!(!in_u_v(&p, "v1", &z, DEFAULT_TOL).unwrap());
        // Beyond the disc is certainly out.
        let z = ChartPoint::new("v1", vec![c(2.0, 0.0)]);
        assert!(!in_u_v(&p, "v1", &z, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn section_completes_chart_points() {
        let p = segment();
        // z = 1: μ = 0, r_{f0}(0) = √(2·(0·(−1)+1/2)) = 1.
        let z = ChartPoint::new("v1", vec![c(1.0, 0.0)]);
        let s = section_s_v(&p, "v1", &z, DEFAULT_TOL).unwrap();
        assert_eq!(s.coord(&p, "f1").unwrap(), c(1.0, 0.0));
        assert_eq!(s.coord(&p, "f0").unwrap(), c(1.0, 0.0));
        // z = 0: the far coordinate is √2.
        let z = ChartPoint::zero(&p, "v1").unwrap();
        let s = section_s_v(&p, "v1", &z, DEFAULT_TOL).unwrap();
        assert_eq!(s.coord(&p, "f0").unwrap().re, 2.0_f64.sqrt());

        // Plane simplex: the missing coordinate is √(2(1 − 1/4)) = √(3/2).
        let p = plane_simplex();
        let z = ChartPoint::new("v2", vec![c(0.5, 0.0), c(0.5, 0.0)]);
        let s = section_s_v(&p, "v2", &z, DEFAULT_TOL).unwrap();
        let want = (1.5_f64).sqrt();
        assert!((s.coord(&p, "f0").unwrap().re - want).abs() < 1e-15);
        assert_eq!(s.coord(&p, "f0").unwrap().im, 0.0);

        // The section output always lies on the level set, recovering μ_v(z).
        let xi = in_z(&p, &s, DEFAULT_TOL).unwrap().expect("on level set");
        let mu = mu_v(&p, "v2", &z).unwrap();
        for (a, b) in xi.xi().iter().zip(mu.xi()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn section_rejects_points_outside_the_polytope() {
        let p = segment();
        let z = ChartPoint::new("v1", vec![c(2.0, 0.0)]);
        assert!(matches!(
            section_s_v(&p, "v1", &z, DEFAULT_TOL),
            Err(Error::PointOutsideDelta { .. })
        ));
    }

    #[test]
    fn level_set_membership_decides_consistency() {
        let p = segment();
        // (√2, 0): f0 forces ξ = −1/2 and f1 agrees.
        let z = AmbientPoint::new(vec![c(2.0_f64.sqrt(), 0.0), c(0.0, 0.0)]);
        let xi = in_z(&p, &z, DEFAULT_TOL).unwrap().expect("consistent");
        assert!((xi.xi()[0] + 0.5).abs() < 1e-15);
        // (0, 0): the two equations demand ξ = +1/2 and ξ = −1/2 at once.
        let z = AmbientPoint::new(vec![c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(in_z(&p, &z, DEFAULT_TOL).unwrap().is_none());
    }

    #[test]
    fn strata_classify_vanishing_patterns() {
        let p = plane_simplex();
        let zero = ChartPoint::zero(&p, "v2").unwrap();
        let s = stratum_of(&p, "v2", &zero, DEFAULT_TOL).unwrap();
        assert_eq!(s.facet_ids(), ["f1", "f2"]);

        let z = ChartPoint::new("v2", vec![c(0.0, 0.0), c(0.5, 0.0)]);
        let s = stratum_of(&p, "v2", &z, DEFAULT_TOL).unwrap();
        assert_eq!(s.facet_ids(), ["f1"]);

        let z = ChartPoint::new("v2", vec![c(0.3, 0.1), c(0.5, 0.0)]);
        assert!(stratum_of(&p, "v2", &z, DEFAULT_TOL).unwrap().is_interior());
    }

    #[test]
    fn torus_action_rotates_coordinates() {
        let p = segment();
        let z = ChartPoint::new("v1", vec![c(1.0, 0.0)]);
        let a = AngleVector::new("v1", vec![0.0]);
        assert_eq!(act(&a, &z).unwrap(), z);
        let a = AngleVector::new("v1", vec![0.5]);
        let rotated = act(&a, &z).unwrap();
        assert!((rotated.coords()[0] - c(-1.0, 0.0)).norm() < 1e-15);
        // Modulus is always preserved.
        let a = AngleVector::new("v1", vec![0.37]);
        let rotated = act(&a, &z).unwrap();
        assert!((rotated.coords()[0].norm() - 1.0).abs() < 1e-15);
        // The action never changes the momentum value.
        let before = mu_v(&p, "v1", &z).unwrap();
        let after = mu_v(&p, "v1", &rotated).unwrap();
        assert!((before.xi()[0] - after.xi()[0]).abs() < 1e-12);
        // Mismatched charts are rejected.
        let a = AngleVector::new("v0", vec![0.1]);
        assert!(matches!(act(&a, &z), Err(Error::WrongChart { .. })));
    }

    #[test]
    fn chart_point_files_round_trip() {
        let p = plane_simplex();
        let z = ChartPoint::new("v2", vec![c(0.5, -0.25), c(0.125, 3.0)]);
        let text = chart_point_json(&p, &z);
        let back = parse_chart_point(&p, &text).unwrap();
        assert_eq!(back, z);
        // Wrong key set is rejected.
        let bad = text.replace("\"f1\"", "\"f9\"");
        assert!(parse_chart_point(&p, &bad).is_err());
        // Unknown vertex is rejected.
        let bad = text.replace("\"v2\"", "\"v9\"");
        assert!(parse_chart_point(&p, &bad).is_err());
    }

    #[test]
    fn ambient_and_momentum_files_round_trip() {
        let p = plane_simplex();
        let z = AmbientPoint::new(vec![c(1.0, 0.0), c(0.0, -1.0), c(0.5, 0.5)]);
        let text = ambient_point_json(&p, &z);
        assert_eq!(parse_ambient_point(&p, &text).unwrap(), z);
        let missing = r#"{"coords": {"f0": [1, 0], "f1": [0, 0]}}"#;
        assert!(parse_ambient_point(&p, missing).is_err());

        let m = MomentumValue::new(vec![0.125, -0.5]);
        let text = momentum_json(&m);
        assert_eq!(parse_momentum(&text, 2).unwrap(), m);
        assert!(parse_momentum(&text, 3).is_err());
    }

    #[test]
    fn wrong_chart_inputs_are_rejected() {
        let p = plane_simplex();
        let z = ChartPoint::new("v1", vec![c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(
            mu_v(&p, "v2", &z),
            Err(Error::WrongChart { .. })
        ));
        let z = ChartPoint::new("v2", vec![c(0.0, 0.0)]);
        assert!(matches!(
            mu_v(&p, "v2", &z),
            Err(Error::CoordinateCountMismatch { .. })
        ));
        let z = ChartPoint::new("nope", vec![]);
        assert!(matches!(mu_v(&p, "nope", &z), Err(Error::UnknownVertex(_))));
    }

    #[test]
    fn membership_respects_strictness_on_excluded_facets() {
        // A square chart: every basis slack may reach 0 (boundary allowed),
        // but excluded slacks must clear the tolerance strictly.
        let facets = vec![
            Facet::from_ints("f0", &[1, 0], 0, 1),
            Facet::from_ints("f1", &[0, 1], 0, 1),
            Facet::from_ints("f2", &[-1, 0], 1, 1),
            Facet::from_ints("f3", &[0, -1], 1, 1),
        ];
        let p = build(2, facets).unwrap();
        // v0 carries {f0, f1}. A point with μ on the far edge is out.
        let z = ChartPoint::new("v0", vec![c(2.0_f64.sqrt(), 0.0), c(0.5, 0.0)]);
        assert!(!in_u_v(&p, "v0", &z, DEFAULT_TOL).unwrap());
        // Pulling μ strictly inside keeps it in.
        let z = ChartPoint::new("v0", vec![c(1.0, 0.0), c(0.5, 0.0)]);
        assert!(in_u_v(&p, "v0", &z, DEFAULT_TOL).unwrap());
        // z = 0 sits on both basis facets: still in the chart domain.
        let z = ChartPoint::zero(&p, "v0").unwrap();
        assert!(in_u_v(&p, "v0", &z, DEFAULT_TOL).unwrap());
    }
}
