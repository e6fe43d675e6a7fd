//! Adaptive Wasserstein curvature denoising (AWCD) for point clouds.
//!
//! The toolkit embeds a point cloud into the manifold of symmetric
//! positive-definite matrices through local covariance statistics, scores
//! every point by the Wasserstein scalar curvature of its local covariance,
//! and removes points below an adaptively chosen threshold read off the
//! curvature histogram. The classical radius (ROR) and statistical (SOR)
//! outlier-removal filters are included as baselines, together with a seeded
//! noise-injection benchmark harness that reports TPR/FPR/SNRG tables.
//!
//! Module map:
//!
//! - [`spd`] — the numerical kernel for the Wasserstein geometry of SPD(n):
//!   spectral decompositions, Sylvester solves, the metric, the Gaussian
//!   transport distance, curvature tensors, scalar curvature and its bound.
//! - [`cloud`] — point-cloud data model, `.xyz`/`.ply` IO, an exact kd-tree,
//!   and per-point neighborhood statistics.
//! - [`denoise`] — the ROR, SOR and AWCD filters, curvature fields,
//!   histograms and adaptive mark-curvature selection.
//! - [`bench`] — downsampling, seeded noise injection, TPR/FPR/SNRG metrics
//!   and the comparison-table runner.
//!
//! A narrative guide with runnable examples lives in `book/`; its code
//! blocks are compiled and executed as doctests of this crate.
//!
//! ```
//! use awcd::spd::SpdMatrix;
//!
//! let a = SpdMatrix::identity(3);
//! let rho = awcd::spd::scalar_curvature(&a).unwrap();
//! assert!((rho.value - 7.875).abs() < 1e-12);
//! ```

pub mod bench;
pub mod cloud;
pub mod denoise;
pub mod spd;

#[cfg(test)]
pub(crate) mod test_support;

#[cfg(doctest)]
mod book;
