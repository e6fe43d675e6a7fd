//! Local Gaussian statistics: the embedding of a cloud into SPD(n).
//!
//! For each point, the mean and covariance of its k nearest neighbors
//! (query point excluded — including it biases the covariance toward zero
//! along the point's own offset). The covariance is centered on the
//! neighborhood mean and normalized by k, which makes the whole pipeline
//! translation invariant; the original uncentered second-moment form is
//! not.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::kdtree::SpatialIndex;
use super::model::{CloudError, PointCloud};
use crate::spd::SpdMatrix;

/// Mean, covariance and degeneracy bookkeeping for one neighborhood.
#[derive(Debug, Clone)]
pub struct PointStats {
    pub mean: DVector<f64>,
    pub covariance: SpdMatrix,
    /// Number of covariance eigenvalues raised to the floor.
    pub clamped: usize,
}

/// Per-point neighborhood statistics for a whole cloud.
#[derive(Debug, Clone)]
pub struct LocalStats {
    pub k: usize,
    pub per_point: Vec<PointStats>,
    /// Set when `k < dim + 1`: every covariance is necessarily
    /// rank-deficient.
    pub rank_warning: bool,
}

/// Computes per-point local statistics with k nearest neighbors each.
///
/// Points are processed in parallel; each result lands in its own slot so
/// the output does not depend on scheduling.
pub fn local_statistics(
    cloud: &PointCloud,
    index: &SpatialIndex,
    k: usize,
) -> Result<LocalStats, CloudError> {
    let n = cloud.len();
    let dim = cloud.dim();
    if n == 0 {
        return Err(CloudError::EmptyCloud);
    }
    if k < 1 || k > n.saturating_sub(1) {
        return Err(CloudError::Parameter(format!(
            "k = {k} out of range 1..={} after self-exclusion",
            n.saturating_sub(1)
        )));
    }

    let per_point: Vec<PointStats> = (0..n)
        .into_par_iter()
        .map(|i| {
            let neighbors = index
                .knn_of_point(i, k)
                .expect("k validated against cloud size");
            let mut mean = DVector::zeros(dim);
            for nb in &neighbors {
                let p = cloud.point(nb.index);
                for a in 0..dim {
                    mean[a] += p[a];
                }
            }
            mean /= k as f64;
            let mut cov = DMatrix::zeros(dim, dim);
            for nb in &neighbors {
                let p = cloud.point(nb.index);
                for a in 0..dim {
                    let da = p[a] - mean[a];
                    for b in a..dim {
                        cov[(a, b)] += da * (p[b] - mean[b]);
                    }
                }
            }
            for a in 0..dim {
                for b in a..dim {
                    let v = cov[(a, b)] / k as f64;
                    cov[(a, b)] = v;
                    cov[(b, a)] = v;
                }
            }
            let (covariance, clamped) =
                SpdMatrix::new_floored(cov).expect("covariance is finite and symmetric");
            PointStats {
                mean,
                covariance,
                clamped,
            }
        })
        .collect();

    Ok(LocalStats {
        k,
        per_point,
        rank_warning: k < dim + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spd::spectral_decompose;

    #[test]
    fn zero_spread_neighborhood_floors_to_identity_scale() {
        // Query point plus four neighbors at the same location.
        let cloud = PointCloud::from_points3(&[
            [5.0, 5.0, 5.0],
            [1.0, 2.0, 3.0],
            [1.0, 2.0, 3.0],
            [1.0, 2.0, 3.0],
            [1.0, 2.0, 3.0],
        ])
        .unwrap();
        let index = SpatialIndex::build(&cloud).unwrap();
        let stats = local_statistics(&cloud, &index, 4).unwrap();
        let s = &stats.per_point[0];
        assert_eq!(s.mean.as_slice(), &[1.0, 2.0, 3.0]);
        assert_eq!(s.clamped, 3);
        // Zero-trace covariance falls back to the absolute floor.
        let dec = spectral_decompose(&s.covariance).unwrap();
        for i in 0..3 {
            assert!((dec.eigenvalues()[i] - 1e-12).abs() < 1e-18);
        }
    }

    #[test]
    fn cross_neighborhood_hand_case() {
        // Neighbors at (±1,0,0),(0,±1,0) around the origin point:
        // mean = origin, covariance = diag(1/2, 1/2, floor).
        let cloud = PointCloud::from_points3(&[
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
        ])
        .unwrap();
        let index = SpatialIndex::build(&cloud).unwrap();
        let stats = local_statistics(&cloud, &index, 4).unwrap();
        let s = &stats.per_point[0];
        assert!(s.mean.norm() < 1e-15);
        assert_eq!(s.clamped, 1);
        let dec = spectral_decompose(&s.covariance).unwrap();
        let floor = s.covariance.eigenvalue_floor();
        assert!((dec.eigenvalues()[0] - floor).abs() <= 1e-6 * floor);
        assert!((dec.eigenvalues()[1] - 0.5).abs() < 1e-12);
        assert!((dec.eigenvalues()[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn translation_moves_means_and_keeps_covariances() {
        let base = PointCloud::from_points3(&[
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.5, 0.0],
            [0.5, 0.5, 1.0],
            [1.0, 1.0, 1.0],
            [0.25, 0.75, 0.5],
        ])
        .unwrap();
        let t = [10.0, -3.0, 7.0];
        let shifted = base.transformed(&DMatrix::identity(3, 3), &t);
        let k = 3;
        let s0 = local_statistics(&base, &SpatialIndex::build(&base).unwrap(), k).unwrap();
        let s1 = local_statistics(&shifted, &SpatialIndex::build(&shifted).unwrap(), k).unwrap();
        for (a, b) in s0.per_point.iter().zip(&s1.per_point) {
            for i in 0..3 {
                assert!((a.mean[i] + t[i] - b.mean[i]).abs() < 1e-12);
            }
            let diff = (a.covariance.as_matrix() - b.covariance.as_matrix()).norm();
            assert!(diff <= 1e-12 * a.covariance.as_matrix().norm().max(1e-12));
        }
    }

    #[test]
    fn rank_warning_for_small_k() {
        let cloud = PointCloud::from_points3(&[
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ])
        .unwrap();
        let index = SpatialIndex::build(&cloud).unwrap();
        let stats = local_statistics(&cloud, &index, 2).unwrap();
        assert!(stats.rank_warning);
        assert!(local_statistics(&cloud, &index, 4).is_err());
        assert!(local_statistics(&cloud, &index, 0).is_err());
    }
}
