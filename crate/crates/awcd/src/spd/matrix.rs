//! Validated matrix types: symmetric matrices (tangent vectors), symmetric
//! positive-definite matrices (base points), and sorted spectral
//! decompositions.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Errors produced by the geometry kernel.
#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("matrix is not symmetric: max |A_ij - A_ji| = {asymmetry:.3e} exceeds {tolerance:.3e}")]
    NotSymmetric { asymmetry: f64, tolerance: f64 },
    #[error("matrix is not positive definite: smallest eigenvalue {min_eigenvalue:.3e}")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("eigendecomposition did not converge; matrix dump:\n{matrix}")]
    EigenFailed { matrix: String },
    #[error("degenerate matrix: eigenvalue sum {sum:.3e} below floor {floor:.3e}")]
    Degenerate { sum: f64, floor: f64 },
    #[error("matrix square root failed: trace term {value:.3e} negative beyond tolerance")]
    SqrtFailed { value: f64 },
    #[error("{0}")]
    Domain(String),
}

/// Relative tolerance for symmetry checks: `1e-12 * max|entry|`.
const SYMMETRY_RTOL: f64 = 1e-12;

/// Eigenvalue floor for an SPD matrix of the given trace and dimension.
///
/// `1e-12 * trace / n`, falling back to an absolute `1e-12` when the matrix
/// has no scale (zero trace), so that `1/(λ_i + λ_j)` stays representable.
pub(crate) fn eigenvalue_floor(trace: f64, n: usize) -> f64 {
    let eps = 1e-12 * trace / n as f64;
    if eps > 0.0 {
        eps
    } else {
        1e-12
    }
}

fn check_square_finite(m: &DMatrix<f64>) -> Result<(), GeometryError> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(GeometryError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(GeometryError::NonFinite);
    }
    Ok(())
}

fn check_symmetry(m: &DMatrix<f64>) -> Result<(), GeometryError> {
    let max_abs = m.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let tol = SYMMETRY_RTOL * max_abs;
    let mut asym = 0.0_f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if asym > tol {
        return Err(GeometryError::NotSymmetric {
            asymmetry: asym,
            tolerance: tol,
        });
    }
    Ok(())
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Dump a matrix as row-major decimal text with 17 significant digits.
pub(crate) fn dump_17(m: &DMatrix<f64>) -> String {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| format!("{:.16e}", m[(i, j)]))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// A real symmetric matrix — a tangent vector of SPD(n).
///
/// Construction validates symmetry within `1e-12 * max|entry|` and stores
/// the exactly symmetrized `(M + Mᵀ)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    m: DMatrix<f64>,
}

impl SymMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self, GeometryError> {
        check_square_finite(&m)?;
        check_symmetry(&m)?;
        Ok(Self { m: symmetrize(&m) })
    }

    /// Builds from a row-major slice.
    pub fn from_rows(n: usize, entries: &[f64]) -> Result<Self, GeometryError> {
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            m: DMatrix::zeros(n, n),
        }
    }

    /// Trusted constructor for matrices that are symmetric by construction.
    pub(crate) fn from_symmetric_unchecked(m: DMatrix<f64>) -> Self {
        Self { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.m
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.norm()
    }
}

/// A symmetric positive-definite matrix — a point of SPD(n).
///
/// Construction symmetrizes and rejects matrices with any non-positive
/// eigenvalue. [`SpdMatrix::new_floored`] instead clamps eigenvalues up to
/// the [floor](eigenvalue_floor), which is how rank-deficient local
/// covariances enter the manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    m: DMatrix<f64>,
}

impl SpdMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self, GeometryError> {
        check_square_finite(&m)?;
        check_symmetry(&m)?;
        let m = symmetrize(&m);
        let (eigenvalues, _) = symmetric_eigen_sorted(&m)?;
        let min = eigenvalues[0];
        if min <= 0.0 {
            return Err(GeometryError::NotPositiveDefinite {
                min_eigenvalue: min,
            });
        }
        Ok(Self { m })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: DMatrix::identity(n, n),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self, GeometryError> {
        if let Some(&bad) = diag.iter().find(|v| !(**v > 0.0)) {
            return Err(GeometryError::NotPositiveDefinite {
                min_eigenvalue: bad,
            });
        }
        Ok(Self {
            m: DMatrix::from_diagonal(&DVector::from_row_slice(diag)),
        })
    }

    /// Builds from a row-major slice, validating symmetry and positivity.
    pub fn from_rows(n: usize, entries: &[f64]) -> Result<Self, GeometryError> {
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    /// Builds from a (possibly rank-deficient) symmetric matrix by clamping
    /// eigenvalues below the floor up to it. Returns the matrix together
    /// with the number of clamped eigenvalues.
    pub fn new_floored(m: DMatrix<f64>) -> Result<(Self, usize), GeometryError> {
        check_square_finite(&m)?;
        let m = symmetrize(&m);
        let n = m.nrows();
        let (mut eigenvalues, basis) = symmetric_eigen_sorted(&m)?;
        let floor = eigenvalue_floor(m.trace(), n);
        let mut clamped = 0;
        for v in eigenvalues.iter_mut() {
            if *v < floor {
                *v = floor;
                clamped += 1;
            }
        }
        if clamped == 0 {
            return Ok((Self { m }, 0));
        }
        let rebuilt = &basis * DMatrix::from_diagonal(&eigenvalues) * basis.transpose();
        Ok((Self { m: symmetrize(&rebuilt) }, clamped))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    /// The eigenvalue floor for this matrix's scale.
    pub fn eigenvalue_floor(&self) -> f64 {
        eigenvalue_floor(self.trace(), self.dim())
    }

    /// Row-major decimal text with 17 significant digits per entry.
    pub fn debug_dump(&self) -> String {
        dump_17(&self.m)
    }
}

/// Eigendecomposition of an SPD matrix with eigenvalues sorted ascending and
/// basis columns matching the eigenvalue order, `A = V·diag(λ)·Vᵀ`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: DVector<f64>,
    basis: DMatrix<f64>,
}

impl SpectralDecomposition {
    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Orthogonal basis; column `i` is the eigenvector for `eigenvalues[i]`.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Reassembles `V·diag(λ)·Vᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.basis * DMatrix::from_diagonal(&self.eigenvalues) * self.basis.transpose()
    }
}

/// Decomposes an SPD matrix into eigenvalues (ascending) and an orthogonal
/// basis.
pub fn spectral_decompose(a: &SpdMatrix) -> Result<SpectralDecomposition, GeometryError> {
    let (eigenvalues, basis) = symmetric_eigen_sorted(a.as_matrix())?;
    Ok(SpectralDecomposition { eigenvalues, basis })
}

/// Symmetric eigendecomposition sorted ascending. Backed by nalgebra's
/// iterative symmetric eigensolver.
pub(crate) fn symmetric_eigen_sorted(
    m: &DMatrix<f64>,
) -> Result<(DVector<f64>, DMatrix<f64>), GeometryError> {
    let eig = m
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 4096)
        .ok_or_else(|| GeometryError::EigenFailed { matrix: dump_17(m) })?;
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut basis = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        basis.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((eigenvalues, basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::{random_spd, rng};

    #[test]
    fn construction_symmetrizes_near_symmetric_input() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0 + 1e-15, 1.0, 2.0]);
        let a = SpdMatrix::new(m).unwrap();
        assert_eq!(a.as_matrix()[(0, 1)], a.as_matrix()[(1, 0)]);
    }

    #[test]
    fn construction_rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.5, 2.0]);
        assert!(matches!(
            SpdMatrix::new(m),
            Err(GeometryError::NotSymmetric { .. })
        ));
    }

    #[test]
    fn construction_rejects_indefinite() {
        // Eigenvalues -1 and 3.
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            SpdMatrix::new(m),
            Err(GeometryError::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn floored_clamps_and_counts() {
        let m = DMatrix::from_diagonal(&DVector::from_row_slice(&[0.0, 0.0, 1.0]));
        let (a, clamped) = SpdMatrix::new_floored(m).unwrap();
        assert_eq!(clamped, 2);
        let floor = eigenvalue_floor(1.0, 3);
        let dec = spectral_decompose(&a).unwrap();
        assert!((dec.eigenvalues()[0] - floor).abs() < floor * 1e-6);
        assert!((dec.eigenvalues()[1] - floor).abs() < floor * 1e-6);
    }

    #[test]
    fn floor_falls_back_on_zero_trace() {
        assert_eq!(eigenvalue_floor(0.0, 3), 1e-12);
        assert!(eigenvalue_floor(3.0, 3) == 1e-12);
        assert!(eigenvalue_floor(3e6, 3) == 1e-6);
    }

    #[test]
    fn identity_decomposition() {
        let dec = spectral_decompose(&SpdMatrix::identity(3)).unwrap();
        for i in 0..3 {
            assert!((dec.eigenvalues()[i] - 1.0).abs() < 1e-14);
        }
        // Any orthogonal basis is acceptable; check orthogonality.
        let q = dec.basis().transpose() * dec.basis();
        assert!((q - DMatrix::<f64>::identity(3, 3)).norm() < 1e-10);
    }

    #[test]
    fn diagonal_decomposition_orders_columns_with_eigenvalues() {
        let a = SpdMatrix::from_diagonal(&[2.0, 1.0]).unwrap();
        let dec = spectral_decompose(&a).unwrap();
        assert!((dec.eigenvalues()[0] - 1.0).abs() < 1e-14);
        assert!((dec.eigenvalues()[1] - 2.0).abs() < 1e-14);
        for (i, &lam) in [1.0, 2.0].iter().enumerate() {
            let v = dec.basis().column(i);
            let residual = a.as_matrix() * v - v * lam;
            assert!(residual.norm() < 1e-12);
        }
    }

    #[test]
    fn random_decomposition_residual() {
        let mut rng = rng(11);
        for _ in 0..10 {
            let a = random_spd(&mut rng, 5, 0.1, 10.0);
            let dec = spectral_decompose(&a).unwrap();
            let residual = (dec.reconstruct() - a.as_matrix()).norm();
            assert!(residual <= 1e-10 * a.as_matrix().norm());
            let vtv = dec.basis().transpose() * dec.basis();
            assert!((vtv - DMatrix::<f64>::identity(5, 5)).norm() <= 1e-10);
            for i in 1..5 {
                assert!(dec.eigenvalues()[i - 1] <= dec.eigenvalues()[i]);
            }
        }
    }

    #[test]
    fn debug_dump_has_17_significant_digits() {
        let a = SpdMatrix::from_diagonal(&[1.0 / 3.0, 2.0]).unwrap();
        let dump = a.debug_dump();
        let lines: Vec<&str> = dump.lines().collect();
        assert_eq!(lines.len(), 2);
        let first: Vec<&str> = lines[0].split(' ').collect();
        assert_eq!(first.len(), 2);
        assert_eq!(first[0], "3.3333333333333331e-1");
        // Round-trips exactly.
        assert_eq!(first[0].parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn sym_matrix_rejects_asymmetry_and_accepts_tolerance() {
        assert!(SymMatrix::from_rows(2, &[0.0, 1.0, 1.0 + 1e-15, 0.0]).is_ok());
        assert!(matches!(
            SymMatrix::from_rows(2, &[0.0, 1.0, 1.1, 0.0]),
            Err(GeometryError::NotSymmetric { .. })
        ));
    }
}
