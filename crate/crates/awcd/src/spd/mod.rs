//! Wasserstein geometry of SPD(n), the manifold of symmetric
//! positive-definite matrices.
//!
//! The metric at a base point `A` is `g(X, Y) = tr(Γ_A[Y]·X) / 2`, where
//! `Γ_A[Y]` solves the Sylvester equation `A·T + T·A = Y`. Its geodesic
//! distance coincides with the transport distance between zero-mean
//! Gaussians, and its scalar curvature has a closed form in the eigenvalues
//! of `A` which the denoiser uses as a per-point information score.
//!
//! Everything here is a pure function of its inputs; values can be shared
//! freely across threads and identical inputs produce identical outputs.

mod curvature;
mod gaussian;
mod matrix;
mod sylvester;

pub use curvature::{
    curvature_tensor, scalar_curvature, scalar_curvature_basis_sum,
    scalar_curvature_basis_sum_with, scalar_curvature_bound, tangent_basis, ScalarCurvature,
};
pub use gaussian::{bures_wasserstein_distance, gaussian_wasserstein_distance, GaussianModel};
pub use matrix::{
    spectral_decompose, GeometryError, SpdMatrix, SpectralDecomposition, SymMatrix,
};
pub use sylvester::{sylvester_solve, wasserstein_metric};
