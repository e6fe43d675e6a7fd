//! Helpers shared by the integration suites.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use awcd::spd::{SpdMatrix, SymMatrix};

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn random_orthogonal(rng: &mut ChaCha20Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.random::<f64>() * 2.0 - 1.0);
    g.qr().q()
}

/// Random SPD matrix with eigenvalues uniform in `[lo, hi]`.
pub fn random_spd(rng: &mut ChaCha20Rng, n: usize, lo: f64, hi: f64) -> SpdMatrix {
    let q = random_orthogonal(rng, n);
    let lam: Vec<f64> = (0..n).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect();
    let d = DMatrix::from_diagonal(&DVector::from_row_slice(&lam));
    SpdMatrix::new(&q * d * q.transpose()).unwrap()
}

/// Random symmetric matrix with entries uniform in `[-1, 1]`.
pub fn random_sym(rng: &mut ChaCha20Rng, n: usize) -> SymMatrix {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = rng.random::<f64>() * 2.0 - 1.0;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    SymMatrix::new(m).unwrap()
}

/// Random unit vector in R³.
pub fn random_unit3(rng: &mut ChaCha20Rng) -> [f64; 3] {
    loop {
        let v = [
            rng.random::<f64>() * 2.0 - 1.0,
            rng.random::<f64>() * 2.0 - 1.0,
            rng.random::<f64>() * 2.0 - 1.0,
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-6 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}
