//! Sylvester solves `A·T + T·A = Y` and the Wasserstein metric built on
//! them.
//!
//! With `A = V·diag(λ)·Vᵀ`, transform the right-hand side into the
//! eigenbasis, divide entrywise by `λ_i + λ_j`, and transform back. For SPD
//! coefficients this is exact and O(n³).

use nalgebra::DMatrix;

use super::matrix::{spectral_decompose, GeometryError, SpdMatrix, SpectralDecomposition, SymMatrix};

/// A reusable solver for a fixed base point: one decomposition, many solves.
pub(crate) struct SylvesterSolver {
    decomp: SpectralDecomposition,
}

impl SylvesterSolver {
    pub fn new(a: &SpdMatrix) -> Result<Self, GeometryError> {
        let decomp = spectral_decompose(a)?;
        let floor = a.eigenvalue_floor();
        let min_sum = 2.0 * decomp.eigenvalues()[0];
        if min_sum < floor {
            return Err(GeometryError::Degenerate {
                sum: min_sum,
                floor,
            });
        }
        Ok(Self { decomp })
    }

    pub fn dim(&self) -> usize {
        self.decomp.dim()
    }

    /// Solves `A·T + T·A = M` for an arbitrary square `M` (symmetric
    /// right-hand sides give symmetric solutions, skew give skew).
    pub fn solve(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let v = self.decomp.basis();
        let lam = self.decomp.eigenvalues();
        let mut t = v.transpose() * m * v;
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                t[(i, j)] /= lam[i] + lam[j];
            }
        }
        v * t * v.transpose()
    }
}

/// Solves the Sylvester equation `A·T + T·A = Y`; the solution is the
/// `Γ_A[Y]` entering the Wasserstein metric.
///
/// Fails with [`GeometryError::Degenerate`] when the smallest eigenvalue sum
/// `λ_i + λ_j` drops below the eigenvalue floor of `A`.
pub fn sylvester_solve(a: &SpdMatrix, y: &SymMatrix) -> Result<SymMatrix, GeometryError> {
    if a.dim() != y.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: a.dim(),
            got: y.dim(),
        });
    }
    let solver = SylvesterSolver::new(a)?;
    let t = solver.solve(y.as_matrix());
    // Symmetric rhs gives a symmetric solution up to rounding.
    Ok(SymMatrix::from_symmetric_unchecked(
        (&t + t.transpose()) * 0.5,
    ))
}

/// The Wasserstein metric `g(A; X, Y) = tr(Γ_A[Y]·X) / 2`.
///
/// Symmetric and bilinear in `X`, `Y`; positive for `X = Y ≠ 0`.
pub fn wasserstein_metric(
    a: &SpdMatrix,
    x: &SymMatrix,
    y: &SymMatrix,
) -> Result<f64, GeometryError> {
    if a.dim() != x.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: a.dim(),
            got: x.dim(),
        });
    }
    let gamma_y = sylvester_solve(a, y)?;
    Ok(0.5 * (gamma_y.as_matrix() * x.as_matrix()).trace())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::{random_spd, random_sym, rng};

    #[test]
    fn identity_halves_the_rhs() {
        let a = SpdMatrix::identity(3);
        let y = SymMatrix::from_rows(3, &[1.0, 2.0, 3.0, 2.0, 5.0, 6.0, 3.0, 6.0, 9.0]).unwrap();
        let t = sylvester_solve(&a, &y).unwrap();
        assert!((t.as_matrix() - y.as_matrix() * 0.5).norm() < 1e-14);
    }

    #[test]
    fn hand_case_diag_1_2() {
        // In A's eigenbasis T_ij = Y_ij / (λ_i + λ_j):
        // [[2/2, 6/3], [6/3, 8/4]] = [[1, 2], [2, 2]].
        let a = SpdMatrix::from_diagonal(&[1.0, 2.0]).unwrap();
        let y = SymMatrix::from_rows(2, &[2.0, 6.0, 6.0, 8.0]).unwrap();
        let t = sylvester_solve(&a, &y).unwrap();
        let want = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 2.0]);
        assert!((t.as_matrix() - want).norm() < 1e-14);
    }

    #[test]
    fn random_residual_oracle() {
        let mut rng = rng(5);
        for _ in 0..20 {
            let a = random_spd(&mut rng, 4, 0.1, 10.0);
            let y = random_sym(&mut rng, 4);
            let t = sylvester_solve(&a, &y).unwrap();
            let residual = a.as_matrix() * t.as_matrix() + t.as_matrix() * a.as_matrix()
                - y.as_matrix();
            assert!(residual.norm() <= 1e-10 * y.as_matrix().norm());
        }
    }

    #[test]
    fn near_zero_eigenvalues_are_degenerate() {
        let a = SpdMatrix::from_diagonal(&[1e-300, 1.0]).unwrap();
        let y = SymMatrix::from_rows(2, &[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            sylvester_solve(&a, &y),
            Err(GeometryError::Degenerate { .. })
        ));
    }

    #[test]
    fn metric_identity_case() {
        // Γ_I[X] = X/2, so g(I; X, X) = tr(X²)/4.
        let a = SpdMatrix::identity(2);
        let x = SymMatrix::from_rows(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let g = wasserstein_metric(&a, &x, &x).unwrap();
        assert!((g - 0.5).abs() < 1e-14);
        assert!(g > 0.0);
    }

    #[test]
    fn metric_zero_vector() {
        let mut rng = rng(6);
        let a = random_spd(&mut rng, 3, 0.5, 4.0);
        let x = SymMatrix::zeros(3);
        let y = random_sym(&mut rng, 3);
        assert_eq!(wasserstein_metric(&a, &x, &y).unwrap(), 0.0);
    }

    #[test]
    fn metric_symmetry_via_two_solves() {
        let mut rng = rng(7);
        for _ in 0..10 {
            let a = random_spd(&mut rng, 3, 0.1, 10.0);
            let x = random_sym(&mut rng, 3);
            let y = random_sym(&mut rng, 3);
            let gxy = wasserstein_metric(&a, &x, &y).unwrap();
            let gyx = wasserstein_metric(&a, &y, &x).unwrap();
            let scale = gxy.abs().max(gyx.abs()).max(1e-30);
            assert!((gxy - gyx).abs() <= 1e-10 * scale);
        }
    }
}
