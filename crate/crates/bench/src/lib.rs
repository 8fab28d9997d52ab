//! Shared instance generators for the criterion benches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stepcover::rational::ratio;
use stepcover::{merge_reduce, RulerInstance};

/// `n` lengths `k/den` with `k` uniform in `0..=den`.
pub fn random_instance(n: usize, den: i64, seed: u64) -> RulerInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lengths = (0..n).map(|_| ratio(rng.random_range(0..=den), den)).collect();
    RulerInstance::new(lengths).expect("grid points lie in [0, 1]")
}

/// A random instance with `n = 4m`, merge-reduced so every adjacent pair sums past one.
pub fn reduced_instance(m: usize, den: i64, seed: u64) -> RulerInstance {
    merge_reduce(&random_instance(4 * m, den, seed))
}
