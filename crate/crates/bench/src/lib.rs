//! Seeded fixtures shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqdb_core::quantum::{Complex64, QuantumState, RegisterLayout};
use sqdb_core::{DigitString, SourceDistribution};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `k` strings drawn uniformly from `Z_A^n`.
pub fn random_candidates(rng: &mut ChaCha8Rng, k: usize, n: usize, modulus: u32) -> Vec<DigitString> {
    (0..k)
        .map(|_| {
            DigitString::new((0..n).map(|_| rng.gen_range(0..modulus)).collect(), modulus)
                .expect("digits below the modulus")
        })
        .collect()
}

pub fn random_bits(rng: &mut ChaCha8Rng, n: usize) -> DigitString {
    random_candidates(rng, 1, n, 2).pop().expect("one candidate")
}

/// A normalized state with random amplitudes on `x ⊗ b`.
pub fn random_state(rng: &mut ChaCha8Rng, x_dim: usize, b_dim: usize) -> QuantumState {
    let layout = RegisterLayout::new([("x", x_dim), ("b", b_dim)]).expect("valid layout");
    let mut amps: Vec<_> = (0..x_dim * b_dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    QuantumState::from_amplitudes(layout, amps).expect("normalized")
}

/// Weights drawn uniformly from (0, 1), normalized.
pub fn random_source(rng: &mut ChaCha8Rng, n: usize) -> SourceDistribution {
    let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(f64::EPSILON..1.0)).collect();
    SourceDistribution::from_weights(&weights).expect("positive weights")
}
