//! Coordinate changes between charts and between chart families.
//!
//! Between two vertex charts there are two parallel transition maps, both
//! driven by the same integer base-change matrix: [`phi`] on the
//! reduced-phase-space side (moduli through radial coordinates, phases
//! through integer powers of unit complex numbers) and [`toric_transition`]
//! on the toric side (a pure Laurent monomial map). Within one chart,
//! [`theta`] converts reduced-phase-space coordinates to toric coordinates
//! in closed form, while [`theta_inverse`] inverts it by solving a small
//! polynomial system for the momentum value with a damped, domain-clamped
//! Newton iteration. [`cpn_theta_inverse`] and [`hirzebruch_t2`] provide
//! the closed forms available for the projective simplex and twisted
//! quadrangle families, used to cross-check the generic solver.
//!
//! Integer powers are always evaluated by repeated multiplication (`powi`),
//! never through `log`/`exp`, so no branch cuts enter.

use num_complex::Complex64;

use crate::charts::{
    checked_chart, in_u_v_at, mu_v_unchecked, r_f_unchecked, AngleVector, ChartPoint,
    MomentumValue,
};
use crate::polytope::DelzantPolytope;
use crate::Error;

/// Tuning for the iterative solvers ([`theta_inverse`], [`hirzebruch_t2`]).
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Scaled-residual convergence target.
    pub tol: f64,
    /// Newton iteration budget.
    pub max_iter: usize,
    /// Interpolation factor for the initial iterate between the chart's
    /// vertex and the polytope barycenter.
    pub damping: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-12,
            max_iter: 100,
            damping: 0.5,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<(), Error> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "solver tolerance must be positive and finite, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter(
                "solver iteration budget must be at least 1".to_string(),
            ));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "solver damping must lie in (0, 1], got {}",
                self.damping
            )));
        }
        Ok(())
    }
}

/// The Laurent monomial transition between two toric charts: the integer
/// exponent table with rows keyed by the source basis facets and columns by
/// the target basis facets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentMap {
    from_vertex: String,
    to_vertex: String,
    row_facets: Vec<String>,
    col_facets: Vec<String>,
    exponents: Vec<Vec<i64>>,
}

impl LaurentMap {
    pub fn from_vertex(&self) -> &str {
        &self.from_vertex
    }

    pub fn to_vertex(&self) -> &str {
        &self.to_vertex
    }

    pub fn row_facets(&self) -> &[String] {
        &self.row_facets
    }

    pub fn col_facets(&self) -> &[String] {
        &self.col_facets
    }

    /// The exponent matrix: `exponents()[row][col]` is the power of the
    /// `row`-th source coordinate contributing to the `col`-th target
    /// coordinate.
    pub fn exponents(&self) -> &[Vec<i64>] {
        &self.exponents
    }

    /// Evaluates the monomial map on a toric chart point.
    ///
    /// # Errors
    /// [`Error::ZeroAtNegativeExponent`] when a coordinate is exactly zero
    /// but appears with a negative exponent; chart mismatches.
    pub fn apply(&self, zeta: &ChartPoint) -> Result<ChartPoint, Error> {
        if zeta.vertex() != self.from_vertex {
            return Err(Error::WrongChart {
                expected: self.from_vertex.clone(),
                got: zeta.vertex().to_string(),
            });
        }
        if zeta.coords().len() != self.row_facets.len() {
            return Err(Error::CoordinateCountMismatch {
                expected: self.row_facets.len(),
                got: zeta.coords().len(),
            });
        }
        let mut out = Vec::with_capacity(self.col_facets.len());
        for col in 0..self.col_facets.len() {
            let mut acc = Complex64::new(1.0, 0.0);
            let mut vanishes = false;
            for (row, &zf) in zeta.coords().iter().enumerate() {
                let e = self.exponents[row][col];
                if e == 0 {
                    continue;
                }
                if zf.norm_sqr() == 0.0 {
                    if e < 0 {
                        return Err(Error::ZeroAtNegativeExponent {
                            facet: self.row_facets[row].clone(),
                        });
                    }
                    vanishes = true;
                } else {
                    acc *= zf.powi(i32::try_from(e).expect("exponent fits in i32"));
                }
            }
            out.push(if vanishes { Complex64::new(0.0, 0.0) } else { acc });
        }
        Ok(ChartPoint::new(self.to_vertex.clone(), out))
    }
}

/// The Laurent transition data between two charts (cached exponent tables,
/// wrapped with their facet keys).
pub fn laurent_map(p: &DelzantPolytope, v: &str, w: &str) -> Result<LaurentMap, Error> {
    let vi = p.vertex_idx(v)?;
    let wi = p.vertex_idx(w)?;
    Ok(LaurentMap {
        from_vertex: v.to_string(),
        to_vertex: w.to_string(),
        row_facets: p.vertices()[vi].facet_set().to_vec(),
        col_facets: p.vertices()[wi].facet_set().to_vec(),
        exponents: p.exponents(vi, wi).clone(),
    })
}

/// The symplectic transition from the chart at `v` to the chart at `w`.
///
/// Each target coordinate starts from the matching source coordinate (for
/// shared facets) or from the radial value `r_g(μ_v(z))` (for facets new to
/// `w`), multiplied by integer powers of the phases of the source
/// coordinates that `w` drops.
///
/// # Errors
/// [`Error::OutsideChartDomain`] when `z` is not in the chart domain of `v`
/// or some dropped coordinate vanishes within `tol`; chart mismatches.
pub fn phi(
    p: &DelzantPolytope,
    v: &str,
    w: &str,
    z: &ChartPoint,
    tol: f64,
) -> Result<ChartPoint, Error> {
    let vi = checked_chart(p, v, z)?;
    let wi = p.vertex_idx(w)?;
    let xi = mu_v_unchecked(p, vi, z.coords());
    if !in_u_v_at(p, vi, xi.xi(), tol) {
        return Err(Error::OutsideChartDomain(format!(
            "point is outside the chart domain of `{v}`"
        )));
    }
    let basis_v = &p.chart(vi).basis;
    let basis_w = &p.chart(wi).basis;
    let exps = p.exponents(vi, wi);

    // Unit phases of the source coordinates dropped by the target chart.
    let mut phases: Vec<Option<Complex64>> = Vec::with_capacity(basis_v.len());
    for (row, &f) in basis_v.iter().enumerate() {
        if basis_w.contains(&f) {
            phases.push(None);
        } else {
            let zf = z.coords()[row];
            let m = zf.norm();
            if m <= tol {
                return Err(Error::OutsideChartDomain(format!(
                    "transition to `{w}` requires a nonzero coordinate on facet `{}`",
                    p.facets()[f].id()
                )));
            }
            phases.push(Some(zf / m));
        }
    }

    let mut out = Vec::with_capacity(basis_w.len());
    for (col, &g) in basis_w.iter().enumerate() {
        let mut val = match basis_v.iter().position(|&f| f == g) {
            Some(row) => z.coords()[row],
            None => Complex64::new(r_f_unchecked(p, g, xi.xi(), tol)?, 0.0),
        };
        for (row, phase) in phases.iter().enumerate() {
            if let Some(ph) = phase {
                let e = exps[row][col];
                if e != 0 {
                    val *= ph.powi(i32::try_from(e).expect("exponent fits in i32"));
                }
            }
        }
        out.push(val);
    }
    Ok(ChartPoint::new(w, out))
}

/// The toric transition from the chart at `v` to the chart at `w`: the pure
/// Laurent monomial map with the base-change exponents. No moduli or square
/// roots are involved.
///
/// # Errors
/// As [`LaurentMap::apply`].
pub fn toric_transition(
    p: &DelzantPolytope,
    v: &str,
    w: &str,
    zeta: &ChartPoint,
) -> Result<ChartPoint, Error> {
    checked_chart(p, v, zeta)?;
    laurent_map(p, v, w)?.apply(zeta)
}

/// The chart-wise map from reduced-phase-space to toric coordinates:
/// `ζ_f = z_f · ∏_{f′ ∉ F_v} r_{f′}(μ_v(z))^{c_{f′}[f]}`, where `c_{f′}`
/// expresses the excluded normal `X_{f′}` in the vertex basis.
///
/// # Errors
/// [`Error::OutsideChartDomain`] when `z` is not in the chart domain (there
/// some radial factor could vanish); chart mismatches.
pub fn theta(
    p: &DelzantPolytope,
    v: &str,
    z: &ChartPoint,
    tol: f64,
) -> Result<ChartPoint, Error> {
    let vi = checked_chart(p, v, z)?;
    let xi = mu_v_unchecked(p, vi, z.coords());
    if !in_u_v_at(p, vi, xi.xi(), tol) {
        return Err(Error::OutsideChartDomain(format!(
            "point is outside the chart domain of `{v}`"
        )));
    }
    let chart = p.chart(vi);
    let mut radii = Vec::with_capacity(chart.excluded.len());
    for &f in &chart.excluded {
        radii.push(r_f_unchecked(p, f, xi.xi(), tol)?);
    }
    let mut out = Vec::with_capacity(z.coords().len());
    for (j, &zf) in z.coords().iter().enumerate() {
        let mut factor = 1.0_f64;
        for (e, &r) in radii.iter().enumerate() {
            let c = chart.excluded_coeffs[e][j];
            if c != 0 {
                factor *= r.powi(i32::try_from(c).expect("exponent fits in i32"));
            }
        }
        out.push(zf * factor);
    }
    Ok(ChartPoint::new(v, out))
}

/// Full result of the toric-to-symplectic inversion: the chart point, the
/// momentum value the solver converged to, the final scaled residual, and
/// the Newton iterations consumed.
#[derive(Debug, Clone)]
pub struct ThetaInverseSolution {
    pub point: ChartPoint,
    pub xi: MomentumValue,
    pub residual: f64,
    pub iterations: usize,
}

/// Inverts [`theta`] on the chart at `v`: finds the momentum value `ξ ∈ Δ_v`
/// solving, for each basis facet `f`,
/// `2(⟨X_f, ξ⟩ + λ_f) · p_f(ξ) = |ζ_f|² · q_f(ξ)`,
/// where `p_f`/`q_f` collect the positive/negative powers of the excluded
/// slacks, then reconstructs `z_f = ζ_f · ∏ r_{f′}(ξ)^{−c_{f′}[f]}`.
///
/// The solver works in doubled-slack coordinates `t_j = 2(⟨X_{f_j}, ξ⟩ + λ_{f_j})`
/// over the basis facets, where the system is the gradient of the strictly
/// convex potential
/// `Φ(t) = Σ_j t_j (ln t_j − 1 − ln τ_j) + Σ_e u_e (ln u_e − 1)`
/// (`u_e` the doubled excluded slacks, affine in `t`; `τ_j = |ζ_j|²`).
/// Damped Newton on `Φ`, with steps clamped inside the positivity region,
/// therefore converges globally to the unique interior minimizer — the
/// root — with no spurious stationary points. Coordinates with `ζ_j = 0`
/// are pinned to the exact boundary value `t_j = 0` and removed from the
/// system, matching the exact-zero semantics of the forward map.
///
/// # Errors
/// [`Error::ConvergenceFailure`] when the iteration budget is exhausted
/// (never observed for finite inputs); invalid config; chart mismatches.
pub fn theta_inverse_detailed(
    p: &DelzantPolytope,
    v: &str,
    zeta: &ChartPoint,
    cfg: &SolverConfig,
) -> Result<ThetaInverseSolution, Error> {
    cfg.validate()?;
    let vi = checked_chart(p, v, zeta)?;
    let chart = p.chart(vi);
    let n = p.dim();
    let tau: Vec<f64> = zeta.coords().iter().map(|z| z.norm_sqr()).collect();

    // Coordinates with zero toric value vanish exactly; only the others
    // carry unknowns. With none left, the point is the chart origin.
    let active: Vec<usize> = (0..n).filter(|&j| tau[j] > 0.0).collect();
    if active.is_empty() {
        return Ok(ThetaInverseSolution {
            point: ChartPoint::new(v, vec![Complex64::new(0.0, 0.0); n]),
            xi: MomentumValue::new(chart.position_f64.clone()),
            residual: 0.0,
            iterations: 0,
        });
    }

    // Every doubled excluded slack is affine in t with positive value at
    // the vertex (t = 0): u_e(t) = Σ_j coeff[e][j] t_j + base[e].
    let m = chart.excluded.len();
    let base: Vec<f64> = chart
        .excluded
        .iter()
        .map(|&f| 2.0 * p.slack_f64(f, &chart.position_f64))
        .collect();
    let coeff = &chart.excluded_coeffs;
    let u_at = |t: &[f64]| -> Vec<f64> {
        (0..m)
            .map(|e| {
                base[e]
                    + active
                        .iter()
                        .map(|&j| coeff[e][j] as f64 * t[j])
                        .sum::<f64>()
            })
            .collect()
    };
    let phi_at = |t: &[f64], u: &[f64]| -> f64 {
        let basis_part: f64 = active
            .iter()
            .map(|&j| t[j] * (t[j].ln() - 1.0 - tau[j].ln()))
            .sum();
        let excluded_part: f64 = u.iter().map(|&ue| ue * (ue.ln() - 1.0)).sum();
        basis_part + excluded_part
    };
    // Scaled residual of the original polynomial system; rows pinned to
    // t_j = 0 are exact.
    let residual_at = |t: &[f64], u: &[f64]| -> f64 {
        let mut worst = 0.0_f64;
        for j in 0..n {
            let mut pj = 1.0_f64;
            let mut qj = 1.0_f64;
            for e in 0..m {
                let c = coeff[e][j];
                if c > 0 {
                    pj *= u[e].powi(i32::try_from(c).expect("exponent fits in i32"));
                } else if c < 0 {
                    qj *= u[e].powi(i32::try_from(-c).expect("exponent fits in i32"));
                }
            }
            let gj = t[j] * pj - tau[j] * qj;
            let scale = 1.0_f64.max(t[j] * pj + tau[j] * qj);
            worst = worst.max(gj.abs() / scale);
        }
        worst
    };

    // Start on the in-face segment toward the barycenter, pulled back
    // toward the vertex until every excluded slack is positive.
    let t_bary: Vec<f64> = chart
        .basis
        .iter()
        .map(|&f| 2.0 * p.slack_f64(f, p.barycenter_f64()))
        .collect();
    let mut t = vec![0.0_f64; n];
    let mut s = cfg.damping;
    for _ in 0..200 {
        for &j in &active {
            t[j] = s * t_bary[j];
        }
        if u_at(&t).iter().all(|&ue| ue > 0.0) {
            break;
        }
        s *= 0.5;
    }

    let k = active.len();
    let mut u = u_at(&t);
    let mut phi = phi_at(&t, &u);
    let mut best_residual = f64::INFINITY;
    let mut iterations = 0usize;
    loop {
        let res = residual_at(&t, &u);
        best_residual = best_residual.min(res);
        if res <= cfg.tol {
            return Ok(finish(p, chart, v, zeta, xi_from(p, chart, &t), res, iterations));
        }
        if iterations >= cfg.max_iter {
            return Err(Error::ConvergenceFailure {
                iterations,
                residual: best_residual,
            });
        }
        iterations += 1;

        // Gradient and Hessian of Φ on the active coordinates:
        // ∇_j = ln t_j − ln τ_j + Σ_e c_e[j] ln u_e,
        // H_jk = δ_jk / t_j + Σ_e c_e[j] c_e[k] / u_e  (positive definite).
        let mut grad = vec![0.0_f64; k];
        let mut hess = vec![vec![0.0_f64; k]; k];
        for (a, &j) in active.iter().enumerate() {
            grad[a] = t[j].ln() - tau[j].ln();
            hess[a][a] += 1.0 / t[j];
        }
        for e in 0..m {
            let log_u = u[e].ln();
            let inv_u = 1.0 / u[e];
            for (a, &ja) in active.iter().enumerate() {
                let ca = coeff[e][ja] as f64;
                if ca == 0.0 {
                    continue;
                }
                grad[a] += ca * log_u;
                for (b, &jb) in active.iter().enumerate() {
                    hess[a][b] += ca * coeff[e][jb] as f64 * inv_u;
                }
            }
        }
        let Some(neg_step) = solve_dense(&hess, &grad) else {
            // The Hessian is positive definite on the feasible region, so
            // this can only be floating-point breakdown.
            return Err(Error::ConvergenceFailure {
                iterations,
                residual: best_residual,
            });
        };
        let step: Vec<f64> = neg_step.iter().map(|&d| -d).collect();
        let slope: f64 = grad.iter().zip(&step).map(|(g, d)| g * d).sum();

        // Clamp the step fraction so t and every u stay strictly positive.
        let mut alpha = 1.0_f64;
        for (a, &j) in active.iter().enumerate() {
            if step[a] < 0.0 {
                alpha = alpha.min(0.95 * (-t[j] / step[a]));
            }
        }
        for e in 0..m {
            let du: f64 = active
                .iter()
                .enumerate()
                .map(|(a, &j)| coeff[e][j] as f64 * step[a])
                .sum();
            if du < 0.0 {
                alpha = alpha.min(0.95 * (-u[e] / du));
            }
        }

        // Backtracking line search. Far from the root the Armijo condition
        // on the convex potential guarantees global progress; near the root
        // potential differences fall below rounding, so a decisive drop in
        // the scaled residual (which the full Newton step delivers
        // quadratically) is accepted as well.
        let mut accepted = false;
        for _ in 0..60 {
            let mut trial = t.clone();
            for (a, &j) in active.iter().enumerate() {
                trial[j] = t[j] + alpha * step[a];
            }
            let trial_u = u_at(&trial);
            let positive = active.iter().all(|&j| trial[j] > 0.0)
                && trial_u.iter().all(|&ue| ue > 0.0);
            if positive {
                let trial_phi = phi_at(&trial, &trial_u);
                let trial_res = residual_at(&trial, &trial_u);
                if trial_phi <= phi + 1e-4 * alpha * slope || trial_res <= 0.5 * res {
                    t = trial;
                    u = trial_u;
                    phi = trial_phi;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            return Err(Error::ConvergenceFailure {
                iterations,
                residual: best_residual,
            });
        }
    }
}

/// Reconstructs `ξ` from the doubled basis slacks: the inverse-transpose
/// basis rows applied to `t_j/2 − λ_{f_j}`.
fn xi_from(p: &DelzantPolytope, chart: &crate::polytope::ChartCache, t: &[f64]) -> Vec<f64> {
    let n = t.len();
    let rhs: Vec<f64> = chart
        .basis
        .iter()
        .zip(t)
        .map(|(&f, &tj)| 0.5 * tj - p.lambda_f64(f))
        .collect();
    (0..n)
        .map(|i| {
            chart.inv_bt[i]
                .iter()
                .zip(&rhs)
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect()
}

/// Inverts [`theta`], returning only the chart point. See
/// [`theta_inverse_detailed`] for the full solver output.
pub fn theta_inverse(
    p: &DelzantPolytope,
    v: &str,
    zeta: &ChartPoint,
    cfg: &SolverConfig,
) -> Result<ChartPoint, Error> {
    Ok(theta_inverse_detailed(p, v, zeta, cfg)?.point)
}

/// The momentum map in toric coordinates: the `ξ` the inversion solver
/// converges to, i.e. `μ_v(θ_v⁻¹(ζ))`.
pub fn mu_toric(
    p: &DelzantPolytope,
    v: &str,
    zeta: &ChartPoint,
    cfg: &SolverConfig,
) -> Result<MomentumValue, Error> {
    Ok(theta_inverse_detailed(p, v, zeta, cfg)?.xi)
}

fn finish(
    p: &DelzantPolytope,
    chart: &crate::polytope::ChartCache,
    v: &str,
    zeta: &ChartPoint,
    xi: Vec<f64>,
    residual: f64,
    iterations: usize,
) -> ThetaInverseSolution {
    let radii: Vec<f64> = chart
        .excluded
        .iter()
        .map(|&f| (2.0 * p.slack_f64(f, &xi)).max(0.0).sqrt())
        .collect();
    let mut coords = Vec::with_capacity(zeta.coords().len());
    for (j, &zf) in zeta.coords().iter().enumerate() {
        let mut factor = 1.0_f64;
        for (e, &r) in radii.iter().enumerate() {
            let c = chart.excluded_coeffs[e][j];
            if c != 0 {
                factor *= r.powi(i32::try_from(-c).expect("exponent fits in i32"));
            }
        }
        coords.push(zf * factor);
    }
    ThetaInverseSolution {
        point: ChartPoint::new(v, coords),
        xi: MomentumValue::new(xi),
        residual,
        iterations,
    }
}

/// Solves the dense linear system `A x = b` by Gaussian elimination with
/// partial pivoting. Returns `None` for a numerically singular matrix or
/// any non-finite input entry.
fn solve_dense(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    if a.iter().any(|row| row.iter().any(|x| !x.is_finite()))
        || b.iter().any(|x| !x.is_finite())
    {
        return None;
    }
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if m[row][col].abs() > m[pivot][col].abs() {
                pivot = row;
            }
        }
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        for row in col + 1..n {
            let factor = m[row][col] / m[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..=n {
                m[row][k] -= factor * m[col][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = m[row][n];
        for k in row + 1..n {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
        if !x[row].is_finite() {
            return None;
        }
    }
    Some(x)
}

/// Closed-form inversion for the projective simplex family:
/// `z_i = ζ_i · √(2γ / (1 + ‖ζ‖²))`.
///
/// # Errors
/// [`Error::InvalidParameter`] unless `γ > 0`; coordinate count mismatch.
pub fn cpn_theta_inverse(
    n: usize,
    gamma: f64,
    zeta: &[Complex64],
) -> Result<Vec<Complex64>, Error> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "offset sum γ must be positive and finite, got {gamma}"
        )));
    }
    if zeta.len() != n {
        return Err(Error::CoordinateCountMismatch {
            expected: n,
            got: zeta.len(),
        });
    }
    let norm_sq: f64 = zeta.iter().map(|z| z.norm_sqr()).sum();
    let factor = (2.0 * gamma / (1.0 + norm_sq)).sqrt();
    Ok(zeta.iter().map(|&z| z * factor).collect())
}

/// Root of the twisted-quadrangle inversion polynomial: the unique
/// `t ∈ [0, 2(γ₊+γ₋))` with
/// `t · (2γ₋ + m·t)^m = (1+τ₁)^m · τ₂ · (2(γ₊+γ₋) − t)`,
/// found by safeguarded Newton–bisection on the bracket (the left side is
/// strictly increasing, the right side strictly decreasing).
///
/// # Errors
/// [`Error::InvalidParameter`] unless `γ± > 0` and `τᵢ ≥ 0` (all finite);
/// [`Error::ConvergenceFailure`] if the budget runs out.
pub fn hirzebruch_t2(
    m: u32,
    gamma_plus: f64,
    gamma_minus: f64,
    tau1: f64,
    tau2: f64,
    cfg: &SolverConfig,
) -> Result<f64, Error> {
    cfg.validate()?;
    for (name, value, positive) in [
        ("gamma_plus", gamma_plus, true),
        ("gamma_minus", gamma_minus, true),
        ("tau1", tau1, false),
        ("tau2", tau2, false),
    ] {
        let ok = value.is_finite() && if positive { value > 0.0 } else { value >= 0.0 };
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "{name} must be {} and finite, got {value}",
                if positive { "positive" } else { "nonnegative" }
            )));
        }
    }
    if tau2 == 0.0 {
        return Ok(0.0); // the boundary root: both sides vanish only at 0
    }
    let b = 2.0 * (gamma_plus + gamma_minus);
    let me = i32::try_from(m).expect("twist fits in i32");
    let k = (1.0 + tau1).powi(me) * tau2;
    let lhs = |t: f64| t * (2.0 * gamma_minus + f64::from(m) * t).powi(me);
    let h = |t: f64| lhs(t) - k * (b - t);
    // d/dt [t·(2γ₋ + mt)^m + k·t]; the m² term vanishes for m = 0 and the
    // base 2γ₋ + mt stays positive throughout, so this is always finite.
    let dh = |t: f64| {
        let base = 2.0 * gamma_minus + f64::from(m) * t;
        base.powi(me) + t * f64::from(m) * f64::from(m) * base.powi(me - 1) + k
    };

    let mut lo = 0.0_f64;
    let mut hi = b;
    // Exact solution of the m = 0 (affine) case; a good start generally.
    let mut t = b * tau2 / (1.0 + tau2);
    for _ in 0..cfg.max_iter {
        let ht = h(t);
        let scale = 1.0_f64.max(lhs(t).abs() + (k * (b - t)).abs());
        if ht.abs() / scale <= cfg.tol {
            return Ok(t);
        }
        if ht < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let newton = t - ht / dh(t);
        t = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    let ht = h(t);
    let scale = 1.0_f64.max(lhs(t).abs() + (k * (b - t)).abs());
    Err(Error::ConvergenceFailure {
        iterations: cfg.max_iter,
        residual: ht.abs() / scale,
    })
}

/// Transports a per-chart angle vector to another chart along the
/// base-change exponents: `a^w_g = Σ_{f ∈ F_v} (w)_f^g · a^v_f (mod 1)`.
/// With this transport the torus actions on both charts intertwine the
/// transition maps.
pub fn transport_angles(
    p: &DelzantPolytope,
    a: &AngleVector,
    w: &str,
) -> Result<AngleVector, Error> {
    let vi = p.vertex_idx(a.vertex())?;
    let wi = p.vertex_idx(w)?;
    if a.angles().len() != p.dim() {
        return Err(Error::CoordinateCountMismatch {
            expected: p.dim(),
            got: a.angles().len(),
        });
    }
    let exps = p.exponents(vi, wi);
    let n = p.dim();
    let mut out = Vec::with_capacity(n);
    for col in 0..n {
        let mut s = 0.0_f64;
        for (row, &af) in a.angles().iter().enumerate() {
            s += exps[row][col] as f64 * af;
        }
        out.push(s.rem_euclid(1.0));
    }
    Ok(AngleVector::new(w, out))
}
