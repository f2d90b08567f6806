//! Exact integer and rational linear algebra.
//!
//! Everything in this module is exact: arbitrary-precision integers
//! ([`BigInt`]) and rationals ([`BigRational`]), no floating point. It
//! provides the three lattice-theoretic primitives the rest of the crate is
//! built on:
//!
//! * [`is_primitive`] — whether an integer vector is a primitive lattice
//!   vector (nonzero, gcd of entries 1), the normalization required of facet
//!   normals;
//! * [`kernel_lattice_basis`] — a ℤ-basis of the integer kernel lattice
//!   `{t ∈ ℤ^d : M·t = 0}` of an integer matrix whose columns generate ℤⁿ,
//!   computed by a column Hermite-normal-form reduction;
//! * [`base_change_coeffs`] — the unique integer coefficients expressing a
//!   lattice vector in a unimodular basis, via Cramer's rule with exact
//!   Bareiss determinants.
//!
//! Matrices are row-major `Vec<Vec<BigInt>>`; a "basis" is a slice of column
//! vectors. Determinants use fraction-free Bareiss elimination so every
//! intermediate division is exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Errors from exact lattice computations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("matrix has rank {rank}, expected full rank {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("columns do not generate the integer lattice (Hermite pivot product {pivot_product})")]
    NotSurjective { pivot_product: BigInt },
    #[error("basis is not unimodular (determinant {det})")]
    NotUnimodular { det: BigInt },
    #[error("malformed matrix: {0}")]
    Shape(String),
}

/// Returns true iff `v` is a primitive lattice vector: nonzero with gcd of
/// entries equal to 1. The zero vector has gcd 0 and is never primitive.
pub fn is_primitive(v: &[BigInt]) -> bool {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    g.is_one()
}

/// Exact determinant of a square integer matrix by fraction-free Bareiss
/// elimination. Every intermediate division is exact, so the result is the
/// true integer determinant with no growth beyond minor sizes.
///
/// # Panics
/// Panics if `m` is not square.
pub fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    for row in m {
        assert_eq!(row.len(), n, "determinant requires a square matrix");
    }
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = 1i8;
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        if k == n - 1 {
            break;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                debug_assert!((&num % &prev).is_zero(), "Bareiss division must be exact");
                a[i][j] = num / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let d = std::mem::take(&mut a[n - 1][n - 1]);
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Result of the column-echelon reduction `M·U = [H | 0]` over ℤ, where `U`
/// is unimodular and `H` is the lower-trapezoidal pivot part.
struct ColumnEchelon {
    rank: usize,
    /// Product of the (positive) pivots of `H`; `1` iff the columns of `M`
    /// generate the full lattice ℤ^rank of their row span.
    pivot_product: BigInt,
    /// Columns of `U` past the pivot columns: a ℤ-basis of
    /// `{t ∈ ℤ^cols : M·t = 0}`. Always saturated, because `U` is unimodular.
    kernel: Vec<Vec<BigInt>>,
}

/// Column reduction of an integer matrix (`rows.len()` × `cols`) by
/// unimodular column operations: Euclidean gcd steps pick the smallest
/// nonzero entry of the working row as pivot and reduce the others modulo
/// it, exactly as in a Hermite-normal-form computation.
fn column_echelon(rows: &[Vec<BigInt>], cols: usize) -> ColumnEchelon {
    let n = rows.len();
    let mut w: Vec<Vec<BigInt>> = rows.to_vec();
    // u holds the accumulated unimodular transform, stored column-major.
    let mut u: Vec<Vec<BigInt>> = (0..cols)
        .map(|j| {
            (0..cols)
                .map(|i| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();

    let swap_cols = |w: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, a: usize, b: usize| {
        if a != b {
            for row in w.iter_mut() {
                row.swap(a, b);
            }
            u.swap(a, b);
        }
    };
    // col[c] -= q * col[p]
    let subtract_col =
        |w: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, c: usize, q: &BigInt, p: usize| {
            for row in w.iter_mut() {
                let delta = q * &row[p];
                row[c] -= delta;
            }
            for i in 0..u[p].len() {
                let delta = q * &u[p][i];
                u[c][i] -= delta;
            }
        };
    let negate_col = |w: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, c: usize| {
        for row in w.iter_mut() {
            let v = -std::mem::take(&mut row[c]);
            row[c] = v;
        }
        for e in u[c].iter_mut() {
            let v = -std::mem::take(e);
            *e = v;
        }
    };

    let mut pivot_col = 0usize;
    let mut pivot_product = BigInt::one();
    for row in 0..n {
        if pivot_col == cols {
            break;
        }
        // Euclidean reduction across columns pivot_col..cols in this row.
        loop {
            let best = (pivot_col..cols)
                .filter(|&c| !w[row][c].is_zero())
                .min_by_key(|&c| w[row][c].abs());
            let Some(best) = best else {
                break; // row is zero on the remaining columns: no pivot here
            };
            swap_cols(&mut w, &mut u, pivot_col, best);
            let mut reduced_all = true;
            for c in pivot_col + 1..cols {
                if w[row][c].is_zero() {
                    continue;
                }
                let q = &w[row][c] / &w[row][pivot_col];
                if !q.is_zero() {
                    subtract_col(&mut w, &mut u, c, &q, pivot_col);
                }
                if !w[row][c].is_zero() {
                    reduced_all = false; // a remainder survives: another gcd round
                }
            }
            if reduced_all {
                if w[row][pivot_col].is_negative() {
                    negate_col(&mut w, &mut u, pivot_col);
                }
                pivot_product *= &w[row][pivot_col];
                pivot_col += 1;
                break;
            }
        }
    }

    ColumnEchelon {
        rank: pivot_col,
        pivot_product,
        kernel: u.split_off(pivot_col),
    }
}

/// ℤ-basis of the integer kernel `{t ∈ ℤ^d : M·t = 0}` of an n×d integer
/// matrix `M` whose rank is `n` and whose columns generate ℤⁿ over ℤ.
///
/// The basis is computed via a column Hermite-normal-form reduction
/// `M·U = [H | 0]` with `U` unimodular; the returned rows are the trailing
/// `d − n` columns of `U`, so they always generate the *full* (saturated)
/// kernel lattice, not merely a finite-index sublattice.
///
/// # Errors
/// [`LatticeError::RankDeficient`] if the rank is below the row count;
/// [`LatticeError::NotSurjective`] if the columns generate a proper
/// sublattice of ℤⁿ (pivot product of `H` exceeds 1);
/// [`LatticeError::Shape`] on an empty or ragged matrix.
pub fn kernel_lattice_basis(matrix: &[Vec<BigInt>]) -> Result<Vec<Vec<BigInt>>, LatticeError> {
    let n = matrix.len();
    if n == 0 {
        return Err(LatticeError::Shape("matrix has no rows".into()));
    }
    let d = matrix[0].len();
    if matrix.iter().any(|row| row.len() != d) {
        return Err(LatticeError::Shape("rows have inconsistent lengths".into()));
    }
    let ech = column_echelon(matrix, d);
    if ech.rank < n {
        return Err(LatticeError::RankDeficient {
            rank: ech.rank,
            expected: n,
        });
    }
    if !ech.pivot_product.is_one() {
        return Err(LatticeError::NotSurjective {
            pivot_product: ech.pivot_product,
        });
    }
    Ok(ech.kernel)
}

/// ℤ-basis of the integer kernel of an arbitrary integer matrix, with no
/// rank or surjectivity requirement. `cols` must be passed explicitly so the
/// zero-row case (kernel = everything) is well defined.
pub(crate) fn integer_kernel(rows: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    column_echelon(rows, cols).kernel
}

/// Rank of an integer matrix with `cols` columns.
pub(crate) fn rank(rows: &[Vec<BigInt>], cols: usize) -> usize {
    column_echelon(rows, cols).rank
}

/// The unique integer coefficients `c` with `Σ cᵢ · basisᵢ = target`, where
/// `basis` is a unimodular family of `n` column vectors in ℤⁿ.
///
/// Uses Cramer's rule with exact Bareiss determinants: since `det = ±1`,
/// each coefficient is `det(basis with column i replaced by target) · det`.
///
/// # Errors
/// [`LatticeError::NotUnimodular`] if `|det(basis)| ≠ 1`;
/// [`LatticeError::Shape`] on dimension mismatches.
pub fn base_change_coeffs(
    basis: &[Vec<BigInt>],
    target: &[BigInt],
) -> Result<Vec<BigInt>, LatticeError> {
    let n = basis.len();
    if target.len() != n || basis.iter().any(|b| b.len() != n) {
        return Err(LatticeError::Shape(format!(
            "expected {n} basis columns of length {n} and a target of length {n}"
        )));
    }
    // Row-major matrix whose columns are the basis vectors.
    let rows: Vec<Vec<BigInt>> = (0..n)
        .map(|i| basis.iter().map(|b| b[i].clone()).collect())
        .collect();
    let d = det(&rows);
    if !d.abs().is_one() {
        return Err(LatticeError::NotUnimodular { det: d });
    }
    let mut coeffs = Vec::with_capacity(n);
    for i in 0..n {
        let mut replaced = rows.clone();
        for (r, row) in replaced.iter_mut().enumerate() {
            row[i] = target[r].clone();
        }
        // det ∈ {±1} makes division by it a multiplication.
        coeffs.push(det(&replaced) * &d);
    }
    Ok(coeffs)
}

/// Exact inverse of the unimodular matrix whose *columns* are `columns`.
/// Returned row-major: `inv[i][j]` with `inv · M = I`.
///
/// # Errors
/// [`LatticeError::NotUnimodular`] if `|det| ≠ 1`.
pub fn unimodular_inverse(columns: &[Vec<BigInt>]) -> Result<Vec<Vec<BigInt>>, LatticeError> {
    let n = columns.len();
    if columns.iter().any(|c| c.len() != n) {
        return Err(LatticeError::Shape("matrix is not square".into()));
    }
    let rows: Vec<Vec<BigInt>> = (0..n)
        .map(|i| columns.iter().map(|c| c[i].clone()).collect())
        .collect();
    let d = det(&rows);
    if !d.abs().is_one() {
        return Err(LatticeError::NotUnimodular { det: d });
    }
    // Adjugate formula: inv[i][j] = det · (−1)^{i+j} · minor(j, i).
    let mut inv = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<BigInt>> = rows
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != j)
                .map(|(_, row)| {
                    row.iter()
                        .enumerate()
                        .filter(|(c, _)| *c != i)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            let cof = det(&minor);
            inv[i][j] = if (i + j) % 2 == 0 { cof * &d } else { -cof * &d };
        }
    }
    Ok(inv)
}

/// Solves the square rational system `A·x = b` by Gaussian elimination with
/// exact arithmetic. Returns `None` when `A` is singular.
pub(crate) fn solve_rational(
    a: &[Vec<BigRational>],
    b: &[BigRational],
) -> Option<Vec<BigRational>> {
    let n = a.len();
    debug_assert!(a.iter().all(|row| row.len() == n) && b.len() == n);
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for i in 0..n {
        let pivot = (i..n).find(|&r| !m[r][i].is_zero())?;
        m.swap(i, pivot);
        let p = m[i][i].clone();
        for j in i..=n {
            let v = &m[i][j] / &p;
            m[i][j] = v;
        }
        for r in 0..n {
            if r != i && !m[r][i].is_zero() {
                let factor = m[r][i].clone();
                for j in i..=n {
                    let delta = &factor * &m[i][j];
                    m[r][j] -= delta;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

/// Certifies that integer rows span a *saturated* sublattice: any integer
/// vector in their rational span is an integer combination of them. This
/// holds iff the gcd of all maximal minors is 1 (equivalently, the Smith
/// normal form of the row matrix has all invariant factors equal to 1).
///
/// Intended as a test oracle for [`kernel_lattice_basis`] outputs; cost is
/// combinatorial in the number of columns, fine at small sizes.
pub fn is_saturated(rows: &[Vec<BigInt>]) -> bool {
    let k = rows.len();
    if k == 0 {
        return true;
    }
    let d = rows[0].len();
    if k > d {
        return false;
    }
    use itertools::Itertools;
    let mut g = BigInt::zero();
    for cols in (0..d).combinations(k) {
        let square: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|row| cols.iter().map(|&c| row[c].clone()).collect())
            .collect();
        g = g.gcd(&det(&square));
        if g.is_one() {
            return true;
        }
    }
    g.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn vec_bi(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| bi(x)).collect()
    }

    fn mat_bi(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| vec_bi(r)).collect()
    }

    #[test]
    fn primitivity_of_unit_and_scaled_vectors() {
        assert!(is_primitive(&vec_bi(&[1, 0])));
        assert!(!is_primitive(&vec_bi(&[2, 4])));
        // Normal of the slanted facet in the Hirzebruch family at m = 1.
        assert!(is_primitive(&vec_bi(&[-1, 1])));
        assert!(!is_primitive(&vec_bi(&[0, 0])));
        assert!(!is_primitive(&vec_bi(&[0, -3])));
        assert!(is_primitive(&vec_bi(&[6, 10, 15])));
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        // Oracle: direct 2×2 and 3×3 cofactor formulas.
        assert_eq!(det(&mat_bi(&[&[0, -2], &[1, -1]])), bi(2));
        assert_eq!(det(&mat_bi(&[&[1, 0], &[0, 1]])), bi(1));
        assert_eq!(det(&mat_bi(&[&[3, 8], &[4, 6]])), bi(3 * 6 - 8 * 4));
        let m = [[2i64, -3, 1], [2, 0, -1], [1, 4, 5]];
        let oracle = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        let rows: Vec<Vec<BigInt>> = m.iter().map(|r| vec_bi(r)).collect();
        assert_eq!(det(&rows), bi(oracle));
        // Singular matrix.
        assert_eq!(det(&mat_bi(&[&[1, 2], &[2, 4]])), bi(0));
        // Zero pivot forces a row swap.
        assert_eq!(det(&mat_bi(&[&[0, 1], &[1, 0]])), bi(-1));
    }

    #[test]
    fn kernel_of_projective_line_normals() {
        // Columns are the two facet normals −1 and +1 of the segment chart
        // family; the kernel lattice is generated by (1, 1) (hand oracle).
        let basis = kernel_lattice_basis(&mat_bi(&[&[-1, 1]])).unwrap();
        assert_eq!(basis, vec![vec_bi(&[1, 1])]);
    }

    #[test]
    fn kernel_of_projective_plane_normals() {
        // Columns X_{f0} = (−1,−1), X_{f1} = (1,0), X_{f2} = (0,1); the
        // kernel is generated by (1,1,1) (hand oracle: sum of columns is 0).
        let m = mat_bi(&[&[-1, 1, 0], &[-1, 0, 1]]);
        let basis = kernel_lattice_basis(&m).unwrap();
        assert_eq!(basis.len(), 1);
        let k = &basis[0];
        assert!(
            k == &vec_bi(&[1, 1, 1]) || k == &vec_bi(&[-1, -1, -1]),
            "unexpected kernel generator {k:?}"
        );
        // Exactness: M·k = 0.
        for row in &m {
            let dot: BigInt = row.iter().zip(k).map(|(a, b)| a * b).sum();
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn kernel_of_injective_map_is_empty() {
        let basis = kernel_lattice_basis(&mat_bi(&[&[1, 0], &[0, 1]])).unwrap();
        assert!(basis.is_empty());
    }

    #[test]
    fn kernel_basis_is_exact_and_saturated_for_square_normals() {
        // The four unit-square normals: e1, e2, −e1, −e2 as columns.
        let m = mat_bi(&[&[1, 0, -1, 0], &[0, 1, 0, -1]]);
        let basis = kernel_lattice_basis(&m).unwrap();
        assert_eq!(basis.len(), 2);
        for k in &basis {
            for row in &m {
                let dot: BigInt = row.iter().zip(k).map(|(a, b)| a * b).sum();
                assert!(dot.is_zero(), "kernel vector {k:?} not annihilated");
            }
        }
        assert!(is_saturated(&basis));
    }

    #[test]
    fn kernel_rejects_rank_deficiency_and_non_surjectivity() {
        assert_eq!(
            kernel_lattice_basis(&mat_bi(&[&[1, 2], &[2, 4]])),
            Err(LatticeError::RankDeficient {
                rank: 1,
                expected: 2
            })
        );
        assert_eq!(
            kernel_lattice_basis(&mat_bi(&[&[2]])),
            Err(LatticeError::NotSurjective {
                pivot_product: bi(2)
            })
        );
        // Index-2 sublattice spanned by (2,0) and (0,1).
        assert_eq!(
            kernel_lattice_basis(&mat_bi(&[&[2, 0], &[0, 1]])),
            Err(LatticeError::NotSurjective {
                pivot_product: bi(2)
            })
        );
    }

    #[test]
    fn base_change_in_one_dimension() {
        // Basis {−1}, target {1}: coefficient −1 (1-D solve oracle).
        let c = base_change_coeffs(&[vec_bi(&[-1])], &vec_bi(&[1])).unwrap();
        assert_eq!(c, vec_bi(&[-1]));
    }

    #[test]
    fn base_change_of_a_basis_element_is_a_unit_vector() {
        let basis = vec![vec_bi(&[1, 1]), vec_bi(&[0, 1])];
        let c = base_change_coeffs(&basis, &vec_bi(&[1, 1])).unwrap();
        assert_eq!(c, vec_bi(&[1, 0]));
        let c = base_change_coeffs(&basis, &vec_bi(&[0, 1])).unwrap();
        assert_eq!(c, vec_bi(&[0, 1]));
    }

    #[test]
    fn base_change_expresses_antidiagonal_normal() {
        // Basis {e1, e2}, target (−1,−1): coefficients (−1,−1) (2-D solve).
        let basis = vec![vec_bi(&[1, 0]), vec_bi(&[0, 1])];
        let c = base_change_coeffs(&basis, &vec_bi(&[-1, -1])).unwrap();
        assert_eq!(c, vec_bi(&[-1, -1]));
    }

    #[test]
    fn base_change_reconstructs_target_exactly() {
        let basis = vec![vec_bi(&[2, 1]), vec_bi(&[1, 1])]; // det 1
        let target = vec_bi(&[7, -3]);
        let c = base_change_coeffs(&basis, &target).unwrap();
        for i in 0..2 {
            let rebuilt: BigInt = (0..2).map(|k| &c[k] * &basis[k][i]).sum();
            assert_eq!(rebuilt, target[i]);
        }
    }

    #[test]
    fn base_change_rejects_non_unimodular_basis() {
        let err = base_change_coeffs(&[vec_bi(&[2])], &vec_bi(&[1])).unwrap_err();
        assert_eq!(err, LatticeError::NotUnimodular { det: bi(2) });
    }

    #[test]
    fn unimodular_inverse_is_exact() {
        // Columns of a shear; inverse is the opposite shear.
        let cols = vec![vec_bi(&[1, 0]), vec_bi(&[1, 1])];
        let inv = unimodular_inverse(&cols).unwrap();
        assert_eq!(inv, mat_bi(&[&[1, -1], &[0, 1]]));
        // inv · M = I.
        for i in 0..2 {
            for j in 0..2 {
                let prod: BigInt = (0..2).map(|k| &inv[i][k] * &cols[j][k]).sum();
                assert_eq!(prod, bi(i64::from(i == j)));
            }
        }
        let err = unimodular_inverse(&[vec_bi(&[0, -2]), vec_bi(&[1, -1])]).unwrap_err();
        assert!(matches!(err, LatticeError::NotUnimodular { .. }));
    }

    #[test]
    fn rational_solver_handles_pivoting_and_singularity() {
        let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        // x + 2y = 5, 3x + 4y = 6 → x = −4, y = 9/2.
        let a = vec![vec![r(1, 1), r(2, 1)], vec![r(3, 1), r(4, 1)]];
        let b = vec![r(5, 1), r(6, 1)];
        let x = solve_rational(&a, &b).unwrap();
        assert_eq!(x, vec![r(-4, 1), r(9, 2)]);
        // Zero first pivot.
        let a = vec![vec![r(0, 1), r(1, 1)], vec![r(1, 1), r(0, 1)]];
        let x = solve_rational(&a, &b).unwrap();
        assert_eq!(x, vec![r(6, 1), r(5, 1)]);
        // Singular.
        let a = vec![vec![r(1, 1), r(1, 1)], vec![r(2, 1), r(2, 1)]];
        assert!(solve_rational(&a, &b).is_none());
    }

    #[test]
    fn saturation_certificate_distinguishes_index() {
        assert!(is_saturated(&[vec_bi(&[1, 1])]));
        assert!(!is_saturated(&[vec_bi(&[2, 2])]));
        assert!(is_saturated(&[vec_bi(&[1, 0, -1]), vec_bi(&[0, 1, -1])]));
        // Index-2 sublattice of a plane in ℤ³.
        assert!(!is_saturated(&[vec_bi(&[2, 0, 0]), vec_bi(&[0, 1, 0])]));
    }
}
