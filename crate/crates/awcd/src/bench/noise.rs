//! Seeded downsampling and noise injection.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::BenchError;
use crate::cloud::{PointCloud, PointLabel};

/// Uniform bounding-box noise at a target signal-to-noise count ratio.
#[derive(Debug, Clone)]
pub struct NoiseSpec {
    /// Target SNR: `|D| / |N|` as a count ratio.
    pub snr: f64,
    /// Bounding-box expansion about its center before sampling.
    pub expansion: f64,
    pub seed: u64,
}

impl NoiseSpec {
    /// Spec with the default 1.2× box expansion.
    pub fn new(snr: f64, seed: u64) -> Result<Self, BenchError> {
        Self::with_expansion(snr, 1.2, seed)
    }

    pub fn with_expansion(snr: f64, expansion: f64, seed: u64) -> Result<Self, BenchError> {
        if !(snr > 0.0) {
            return Err(BenchError::Parameter(format!("snr {snr} must be > 0")));
        }
        if !(expansion >= 1.0) {
            return Err(BenchError::Parameter(format!(
                "bbox expansion {expansion} must be >= 1"
            )));
        }
        Ok(Self {
            snr,
            expansion,
            seed,
        })
    }

    /// Number of noise points for a clean cloud of the given size.
    pub fn noise_count(&self, clean: usize) -> Result<usize, BenchError> {
        let count = (clean as f64 / self.snr).round() as usize;
        if count < 1 {
            return Err(BenchError::Parameter(format!(
                "snr {} yields no noise points for |D| = {clean}",
                self.snr
            )));
        }
        Ok(count)
    }
}

/// Uniform random subset without replacement, deterministic in the seed;
/// the surviving points keep their original order.
pub fn downsample(cloud: &PointCloud, target: usize, seed: u64) -> Result<PointCloud, BenchError> {
    if target < 1 || target > cloud.len() {
        return Err(BenchError::Parameter(format!(
            "downsample target {target} out of range 1..={}",
            cloud.len()
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, cloud.len(), target).into_vec();
    picked.sort_unstable();
    Ok(cloud.subset(&picked)?)
}

/// Appends `round(|D| / SNR)` noise points drawn uniformly from the cloud's
/// axis-aligned bounding box expanded about its center, labelling original
/// points `real` and appended points `noise`.
pub fn inject_noise(cloud: &PointCloud, spec: &NoiseSpec) -> Result<PointCloud, BenchError> {
    let clean = cloud.len();
    let count = spec.noise_count(clean)?;
    let (lo, hi) = cloud.bounding_box()?;
    let dim = cloud.dim();
    let mut center = vec![0.0; dim];
    let mut half = vec![0.0; dim];
    for a in 0..dim {
        center[a] = 0.5 * (lo[a] + hi[a]);
        half[a] = 0.5 * (hi[a] - lo[a]) * spec.expansion;
    }

    let mut polluted = cloud.clone();
    polluted.ensure_labels(PointLabel::Real);
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let mut point = vec![0.0; dim];
    for _ in 0..count {
        for a in 0..dim {
            let u: f64 = rand::Rng::random(&mut rng);
            point[a] = center[a] + (2.0 * u - 1.0) * half[a];
        }
        polluted.push_point(&point, Some(PointLabel::Noise));
    }
    Ok(polluted)
}
