//! Curvature of SPD(n) under the Wasserstein metric.
//!
//! The Riemannian curvature tensor has the closed form
//!
//! ```text
//! R(X,Y,X,Y) = 3 tr(Γ_A[X]·A·Γ_A[Γ_A[X]Γ_A[Y] − Γ_A[Y]Γ_A[X]]·A·Γ_A[Y])
//! ```
//!
//! and the scalar curvature reduces to a function of the eigenvalues alone:
//! with `Λ = diag(λ₁ ≤ … ≤ λₙ)` and the strictly upper-triangular
//! `U_ij = 1/(λ_i + λ_j)` for `i < j` (same eigenvalue ordering in both),
//!
//! ```text
//! ρ(A) = 3 tr(2ΛUUᵀ + ΛUᵀU + ΛU(U+Uᵀ)Λ(U+Uᵀ))
//! ```
//!
//! ρ stays positive and below `3n/λ_min2(A)` — degeneracy in a single
//! eigen-direction does not blow it up; only matrices degenerate in two or
//! more directions cap out.

use nalgebra::DMatrix;

use super::matrix::{spectral_decompose, GeometryError, SpdMatrix, SymMatrix};
use super::sylvester::SylvesterSolver;

/// Curvature tensor component `R(X, Y, X, Y)` at `A`.
pub fn curvature_tensor(
    a: &SpdMatrix,
    x: &SymMatrix,
    y: &SymMatrix,
) -> Result<f64, GeometryError> {
    if x.dim() != a.dim() || y.dim() != a.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: a.dim(),
            got: if x.dim() != a.dim() { x.dim() } else { y.dim() },
        });
    }
    let solver = SylvesterSolver::new(a)?;
    Ok(curvature_tensor_with(&solver, a, x.as_matrix(), y.as_matrix()))
}

/// Tensor evaluation reusing a prepared solver. The commutator argument is
/// skew-symmetric, so the inner solve runs on the raw matrix form.
fn curvature_tensor_with(
    solver: &SylvesterSolver,
    a: &SpdMatrix,
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
) -> f64 {
    let gx = solver.solve(x);
    let gy = solver.solve(y);
    let commutator = &gx * &gy - &gy * &gx;
    let gc = solver.solve(&commutator);
    3.0 * (gx * a.as_matrix() * gc * a.as_matrix() * gy).trace()
}

/// Scalar curvature along with a flag for capped degenerate inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarCurvature {
    /// ρ(A), or the cap `3n/ε` when the input degenerates in ≥ 2 directions.
    pub value: f64,
    /// True when the value is the cap rather than the closed form.
    pub degenerate: bool,
}

/// Scalar curvature ρ(A) from the eigenvalue closed form.
///
/// Eigenvalues below the floor are clamped to it first. If two or more
/// eigenvalues needed clamping the matrix is degenerate beyond what the
/// curvature bound controls; the result is then the capped value `3n/ε`
/// with `degenerate = true` instead of an error.
pub fn scalar_curvature(a: &SpdMatrix) -> Result<ScalarCurvature, GeometryError> {
    let n = a.dim();
    if n == 1 {
        return Ok(ScalarCurvature {
            value: 0.0,
            degenerate: false,
        });
    }
    let decomp = spectral_decompose(a)?;
    let floor = a.eigenvalue_floor();
    let mut lam: Vec<f64> = decomp.eigenvalues().iter().copied().collect();
    let mut clamped = 0;
    for l in lam.iter_mut() {
        if *l < floor {
            *l = floor;
            clamped += 1;
        }
    }
    if clamped >= 2 {
        return Ok(ScalarCurvature {
            value: 3.0 * n as f64 / floor,
            degenerate: true,
        });
    }
    Ok(ScalarCurvature {
        value: eigenvalue_closed_form(&lam),
        degenerate: false,
    })
}

/// Evaluates the closed form on ascending eigenvalues.
pub(crate) fn eigenvalue_closed_form(lam_ascending: &[f64]) -> f64 {
    let n = lam_ascending.len();
    let mut u = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            u[(i, j)] = 1.0 / (lam_ascending[i] + lam_ascending[j]);
        }
    }
    let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(lam_ascending));
    let s = &u + u.transpose();
    let term = 2.0 * (&lambda * &u * u.transpose())
        + &lambda * u.transpose() * &u
        + &lambda * &u * &s * &lambda * &s;
    3.0 * term.trace()
}

/// Upper curvature bound `3n/λ_min2(A)`, with `λ_min2` the second-smallest
/// eigenvalue counted with multiplicity. Requires `n ≥ 2`.
pub fn scalar_curvature_bound(a: &SpdMatrix) -> Result<f64, GeometryError> {
    let n = a.dim();
    if n < 2 {
        return Err(GeometryError::Domain(
            "curvature bound needs dimension >= 2".into(),
        ));
    }
    let decomp = spectral_decompose(a)?;
    Ok(3.0 * n as f64 / decomp.eigenvalues()[1])
}

/// The canonical Frobenius-orthonormal basis of the symmetric matrices:
/// `E_ii` and `(E_ij + E_ji)/√2`, `n(n+1)/2` elements.
pub fn tangent_basis(n: usize) -> Vec<SymMatrix> {
    let mut basis = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        let mut e = DMatrix::zeros(n, n);
        e[(i, i)] = 1.0;
        basis.push(SymMatrix::from_symmetric_unchecked(e));
    }
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in (i + 1)..n {
            let mut e = DMatrix::zeros(n, n);
            e[(i, j)] = inv_sqrt2;
            e[(j, i)] = inv_sqrt2;
            basis.push(SymMatrix::from_symmetric_unchecked(e));
        }
    }
    basis
}

/// Sums `R(e_i, e_j, e_i, e_j)` over a metric-orthonormal tangent basis
/// obtained by Gram–Schmidt from the canonical basis.
///
/// This is the basis-sum route to the scalar curvature, evaluated purely
/// through [`curvature_tensor`]; it is independent of the eigenvalue closed
/// form and serves as its cross-check. The trace of a tensor does not depend
/// on the orthonormal basis chosen, which
/// [`scalar_curvature_basis_sum_with`] lets tests verify directly. Limited
/// to `n ≤ 4`; the basis has `n(n+1)/2` elements and the sum is quadratic in
/// that count.
pub fn scalar_curvature_basis_sum(a: &SpdMatrix) -> Result<f64, GeometryError> {
    let start = tangent_basis(a.dim());
    scalar_curvature_basis_sum_with(a, &start)
}

/// Basis-sum scalar curvature starting Gram–Schmidt from a caller-provided
/// spanning set of the tangent space.
pub fn scalar_curvature_basis_sum_with(
    a: &SpdMatrix,
    start: &[SymMatrix],
) -> Result<f64, GeometryError> {
    let n = a.dim();
    if n > 4 {
        return Err(GeometryError::Domain(
            "basis-sum curvature is limited to dimension <= 4".into(),
        ));
    }
    let expected = n * (n + 1) / 2;
    if start.len() != expected {
        return Err(GeometryError::DimensionMismatch {
            expected,
            got: start.len(),
        });
    }
    let solver = SylvesterSolver::new(a)?;
    let metric = |x: &DMatrix<f64>, y: &DMatrix<f64>| 0.5 * (solver.solve(y) * x).trace();

    let mut basis: Vec<DMatrix<f64>> = Vec::with_capacity(expected);
    for e in start {
        if e.dim() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                got: e.dim(),
            });
        }
        let mut v = e.as_matrix().clone();
        for u in &basis {
            let coeff = metric(&v, u);
            v -= u * coeff;
        }
        let norm2 = metric(&v, &v);
        if norm2 <= 0.0 {
            return Err(GeometryError::Domain(
                "starting set does not span the tangent space".into(),
            ));
        }
        basis.push(v / norm2.sqrt());
    }

    let mut total = 0.0;
    for (i, ei) in basis.iter().enumerate() {
        for (j, ej) in basis.iter().enumerate() {
            if i != j {
                total += curvature_tensor_with(&solver, a, ei, ej);
            }
        }
    }
    Ok(total)
}
