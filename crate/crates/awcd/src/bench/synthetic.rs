//! Synthetic fixtures standing in for real scans, so tests and demos need
//! no external data.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::cloud::PointCloud;

/// Points uniform on the unit sphere surface, deterministic in the seed.
pub fn sphere_surface(count: usize, seed: u64) -> PointCloud {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let mut coords = Vec::with_capacity(count * 3);
    let mut produced = 0;
    while produced < count {
        let g: [f64; 3] = [
            normal.sample(&mut rng),
            normal.sample(&mut rng),
            normal.sample(&mut rng),
        ];
        let norm = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
        if norm < 1e-12 {
            continue;
        }
        coords.extend_from_slice(&[g[0] / norm, g[1] / norm, g[2] / norm]);
        produced += 1;
    }
    PointCloud::new(3, coords).expect("finite by construction")
}
