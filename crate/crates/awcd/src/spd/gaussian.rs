//! Transport distance between Gaussian models.

use nalgebra::{DMatrix, DVector};

use super::matrix::{symmetric_eigen_sorted, GeometryError, SpdMatrix};

/// A Gaussian distribution on Rⁿ: mean vector plus SPD covariance.
#[derive(Debug, Clone)]
pub struct GaussianModel {
    mean: DVector<f64>,
    covariance: SpdMatrix,
}

impl GaussianModel {
    pub fn new(mean: DVector<f64>, covariance: SpdMatrix) -> Result<Self, GeometryError> {
        if mean.len() != covariance.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: covariance.dim(),
                got: mean.len(),
            });
        }
        Ok(Self { mean, covariance })
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &SpdMatrix {
        &self.covariance
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// `tr((Σ₁Σ₂)^{1/2})` via the symmetric route
/// `tr((Σ₁^{1/2}·Σ₂·Σ₁^{1/2})^{1/2})`: two symmetric eigendecompositions,
/// identical trace, no principal root of a non-symmetric product.
fn trace_sqrt_product(s1: &SpdMatrix, s2: &SpdMatrix) -> Result<f64, GeometryError> {
    let (lam, v) = symmetric_eigen_sorted(s1.as_matrix())?;
    let sqrt_lam = DVector::from_iterator(lam.len(), lam.iter().map(|l| l.max(0.0).sqrt()));
    let s1_half = &v * DMatrix::from_diagonal(&sqrt_lam) * v.transpose();
    let middle = &s1_half * s2.as_matrix() * &s1_half;
    let middle = (&middle + middle.transpose()) * 0.5;
    let (mu, _) = symmetric_eigen_sorted(&middle)?;
    // The product is PSD; tolerate rounding-scale negatives only.
    let scale = mu[mu.len() - 1].abs().max(1.0);
    let mut total = 0.0;
    for m in mu.iter() {
        if *m < -1e-10 * scale {
            return Err(GeometryError::SqrtFailed { value: *m });
        }
        total += m.max(0.0).sqrt();
    }
    Ok(total)
}

/// Distance between Gaussians:
/// `‖μ₁ − μ₂‖ + tr^{1/2}(Σ₁ + Σ₂ − 2(Σ₁Σ₂)^{1/2})`.
///
/// Symmetric in its arguments, zero exactly when the models coincide. The
/// mean gap is added to the trace root (not combined under one square
/// root), so no triangle inequality is claimed for this form; see
/// [`bures_wasserstein_distance`] for the conventional combination.
pub fn gaussian_wasserstein_distance(
    g1: &GaussianModel,
    g2: &GaussianModel,
) -> Result<f64, GeometryError> {
    let (mean_gap, trace_term) = distance_parts(g1, g2)?;
    Ok(mean_gap + trace_term.sqrt())
}

/// The conventional transport distance between Gaussians:
/// `(‖μ₁ − μ₂‖² + tr(Σ₁ + Σ₂ − 2(Σ₁Σ₂)^{1/2}))^{1/2}`.
pub fn bures_wasserstein_distance(
    g1: &GaussianModel,
    g2: &GaussianModel,
) -> Result<f64, GeometryError> {
    let (mean_gap, trace_term) = distance_parts(g1, g2)?;
    Ok((mean_gap * mean_gap + trace_term).sqrt())
}

fn distance_parts(g1: &GaussianModel, g2: &GaussianModel) -> Result<(f64, f64), GeometryError> {
    if g1.dim() != g2.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: g1.dim(),
            got: g2.dim(),
        });
    }
    let mean_gap = (g1.mean() - g2.mean()).norm();
    let tr1 = g1.covariance().trace();
    let tr2 = g2.covariance().trace();
    let cross = trace_sqrt_product(g1.covariance(), g2.covariance())?;
    let mut trace_term = tr1 + tr2 - 2.0 * cross;
    if trace_term < 0.0 {
        if trace_term < -1e-10 * (tr1 + tr2) {
            return Err(GeometryError::SqrtFailed { value: trace_term });
        }
        trace_term = 0.0;
    }
    Ok((mean_gap, trace_term))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::{random_spd, rng};

    fn gaussian(mean: &[f64], cov: SpdMatrix) -> GaussianModel {
        GaussianModel::new(DVector::from_row_slice(mean), cov).unwrap()
    }

    #[test]
    fn identical_models_are_at_zero() {
        let g = gaussian(&[1.0, -2.0], SpdMatrix::from_diagonal(&[2.0, 0.5]).unwrap());
        let d = gaussian_wasserstein_distance(&g, &g).unwrap();
        assert!(d.abs() < 1e-7, "d = {d}");
    }

    #[test]
    fn equal_covariances_reduce_to_mean_gap() {
        let cov = SpdMatrix::from_diagonal(&[1.5, 2.5]).unwrap();
        let g1 = gaussian(&[0.0, 0.0], cov.clone());
        let g2 = gaussian(&[3.0, 4.0], cov);
        let d = gaussian_wasserstein_distance(&g1, &g2).unwrap();
        assert!((d - 5.0).abs() < 1e-7);
    }

    #[test]
    fn crossed_diagonals_give_sqrt_two() {
        // (Σ₁Σ₂)^{1/2} = diag(2,2); trace term = (1+4) + (4+1) - 2*4 = 2.
        let g1 = gaussian(&[0.0, 0.0], SpdMatrix::from_diagonal(&[1.0, 4.0]).unwrap());
        let g2 = gaussian(&[0.0, 0.0], SpdMatrix::from_diagonal(&[4.0, 1.0]).unwrap());
        let d = gaussian_wasserstein_distance(&g1, &g2).unwrap();
        assert!((d - 2.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn distance_is_symmetric_and_nonnegative() {
        let mut rng = rng(13);
        for _ in 0..20 {
            let g1 = gaussian(&[0.3, -0.7, 1.1], random_spd(&mut rng, 3, 0.2, 5.0));
            let g2 = gaussian(&[-1.0, 0.0, 2.0], random_spd(&mut rng, 3, 0.2, 5.0));
            let d12 = gaussian_wasserstein_distance(&g1, &g2).unwrap();
            let d21 = gaussian_wasserstein_distance(&g2, &g1).unwrap();
            assert!(d12 >= 0.0);
            assert!((d12 - d21).abs() <= 1e-10 * d12.max(1.0));
        }
    }

    #[test]
    fn conventional_form_differs_by_combination_only() {
        let g1 = gaussian(&[1.0, 0.0], SpdMatrix::from_diagonal(&[1.0, 4.0]).unwrap());
        let g2 = gaussian(&[0.0, 0.0], SpdMatrix::from_diagonal(&[4.0, 1.0]).unwrap());
        let printed = gaussian_wasserstein_distance(&g1, &g2).unwrap();
        let standard = bures_wasserstein_distance(&g1, &g2).unwrap();
        assert!((printed - (1.0 + 2.0_f64.sqrt())).abs() < 1e-12);
        assert!((standard - 3.0_f64.sqrt()).abs() < 1e-12);
    }
}
