//! Numerical search: idempotents by constrained maximization, and the
//! nonexistence certificate for cubic solutions of the p-Laplace equation.

pub mod certify;
pub mod idempotents;
pub mod moments;
pub mod optimize;
pub mod residual;
pub mod sphere;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Independent, reproducible generator for restart `index` under `seed`.
pub fn restart_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform point on the unit sphere in `R^n`.
pub fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let norm = crate::scalar::norm_f64(&v);
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}
