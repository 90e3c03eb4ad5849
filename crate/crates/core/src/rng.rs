//! Counter-based random streams.
//!
//! Every random draw is addressed by `(seed, domain, index)`: the seed and the
//! domain form the ChaCha key and the index selects the stream. Per-item streams
//! make results independent of how work is split across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Stream domains used across the crate.
pub mod domain {
    pub const POINTS: u64 = 1;
    pub const NOISE: u64 = 2;
    pub const MONTE_CARLO: u64 = 3;
    pub const DIRECTION: u64 = 4;
    pub const TEST_POINTS: u64 = 5;
}

pub fn stream(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&domain.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// A point drawn uniformly on `S^{d-1}` by normalizing a standard Gaussian vector.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-300 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}
