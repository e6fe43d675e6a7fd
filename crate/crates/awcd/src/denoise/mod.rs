//! The three denoisers — radius outlier removal, statistical outlier
//! removal, and adaptive Wasserstein curvature denoising — plus the
//! curvature field and threshold machinery AWCD is built from.
//!
//! All denoisers classify points; none moves or invents them. The kept set
//! is always a subset of the input indices.

mod field;
mod histogram;
mod mark;

pub use field::{curvature_field, curvature_field_from_stats, CurvatureField};
pub use histogram::{build_histogram, CurvatureHistogram};
pub use mark::{mark_curvature, MarkCurvature, MarkMethod, TroughDiagnostics};

use nalgebra::DVector;
use thiserror::Error;

use crate::cloud::{local_statistics, CloudError, PointCloud, SpatialIndex};
use crate::spd::{GeometryError, SpdMatrix};

/// Errors from the denoising layer.
#[derive(Debug, Error)]
pub enum DenoiseError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(
        "degenerate curvature histogram ({0}); pass an explicit mark curvature to proceed"
    )]
    DegenerateHistogram(String),
    #[error(transparent)]
    Cloud(#[from] CloudError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// How the AWCD threshold was chosen.
pub type RhoSelection = MarkMethod;

/// Parameters a denoiser actually ran with.
#[derive(Debug, Clone)]
pub enum MethodSummary {
    Ror {
        radius: f64,
        min_count: usize,
    },
    Sor {
        k: usize,
    },
    Awcd {
        k: usize,
        mark: MarkCurvature,
        regular_term: bool,
    },
}

/// Outcome of a denoising run: the kept indices (ascending), the parameters
/// used, and the per-point decision statistic (neighbor count, confidence
/// margin, or curvature).
#[derive(Debug, Clone)]
pub struct DenoiseResult {
    pub kept: Vec<usize>,
    pub method: MethodSummary,
    pub scores: Vec<f64>,
}

impl DenoiseResult {
    pub fn removed(&self, total: usize) -> usize {
        total - self.kept.len()
    }
}

/// Radius outlier removal: keep every point whose closed `d`-ball contains
/// at least `min_count` cloud points (the point itself counts).
pub fn ror(
    cloud: &PointCloud,
    index: &SpatialIndex,
    radius: f64,
    min_count: usize,
) -> Result<DenoiseResult, DenoiseError> {
    if !(radius > 0.0) {
        return Err(DenoiseError::Parameter(format!(
            "radius {radius} must be positive"
        )));
    }
    if min_count < 1 {
        return Err(DenoiseError::Parameter("min-count must be >= 1".into()));
    }
    let mut kept = Vec::new();
    let mut scores = Vec::with_capacity(cloud.len());
    for i in 0..cloud.len() {
        let count = index.radius_count(cloud.point(i), radius)?;
        scores.push(count as f64);
        if count >= min_count {
            kept.push(i);
        }
    }
    Ok(DenoiseResult {
        kept,
        method: MethodSummary::Ror { radius, min_count },
        scores,
    })
}

/// The generalized one-sigma confidence test:
/// `(P−μ)ᵀ·Σ·(P−μ) ≥ ‖P−μ‖⁴`.
///
/// For isotropic `Σ = σ²·I` both sides divide by `‖P−μ‖²` into the classic
/// one-sigma law `‖P−μ‖ ≤ σ`.
pub fn confidence_keep(offset: &DVector<f64>, covariance: &SpdMatrix) -> bool {
    let quad = (covariance.as_matrix() * offset).dot(offset);
    let norm2 = offset.norm_squared();
    quad >= norm2 * norm2
}

/// Statistical outlier removal: keep every point lying in the one-sigma
/// confidence area of its k-neighborhood Gaussian.
pub fn sor(
    cloud: &PointCloud,
    index: &SpatialIndex,
    k: usize,
) -> Result<DenoiseResult, DenoiseError> {
    let stats = local_statistics(cloud, index, k)?;
    let mut kept = Vec::new();
    let mut scores = Vec::with_capacity(cloud.len());
    for (i, s) in stats.per_point.iter().enumerate() {
        let p = DVector::from_row_slice(cloud.point(i));
        let offset = &p - &s.mean;
        let quad = (s.covariance.as_matrix() * &offset).dot(&offset);
        let norm2 = offset.norm_squared();
        scores.push(quad - norm2 * norm2);
        if quad >= norm2 * norm2 {
            kept.push(i);
        }
    }
    Ok(DenoiseResult {
        kept,
        method: MethodSummary::Sor { k },
        scores,
    })
}

/// Adaptive Wasserstein curvature denoising.
///
/// Scores every point by the scalar curvature of its local covariance and
/// keeps those at or above the mark curvature ρ₀. The mark comes from the
/// curvature histogram's trough (or the Otsu fallback) unless an explicit
/// override is given. With `regular_term` the keep rule additionally
/// requires the [`confidence_keep`] test, which removes points whose bias
/// from the neighborhood mean is large even when their curvature is high.
pub fn awcd(
    cloud: &PointCloud,
    index: &SpatialIndex,
    k: usize,
    rho0_override: Option<f64>,
    regular_term: bool,
) -> Result<DenoiseResult, DenoiseError> {
    let stats = local_statistics(cloud, index, k)?;
    let field = curvature_field_from_stats(&stats);
    let mark = match rho0_override {
        Some(value) => MarkCurvature::manual(value),
        None => {
            let hist = build_histogram(&field, None)?;
            mark_curvature(&hist)?
        }
    };
    let rho0 = mark.value;
    let mut kept = Vec::new();
    for i in 0..cloud.len() {
        if field.values[i] < rho0 {
            continue;
        }
        if regular_term {
            let s = &stats.per_point[i];
            let p = DVector::from_row_slice(cloud.point(i));
            if !confidence_keep(&(&p - &s.mean), &s.covariance) {
                continue;
            }
        }
        kept.push(i);
    }
    Ok(DenoiseResult {
        kept,
        method: MethodSummary::Awcd {
            k,
            mark,
            regular_term,
        },
        scores: field.values,
    })
}
