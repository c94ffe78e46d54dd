//! Seeded random streams.
//!
//! Run `r` of an experiment with master seed `s` uses the ChaCha8 stream
//! `r` of key `s`, so runs are independent and reproducible in any order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type RunRng = ChaCha8Rng;

pub fn run_rng(master_seed: u64, run: usize) -> RunRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(run as u64);
    rng
}

pub fn run_rngs(master_seed: u64, runs: usize) -> Vec<RunRng> {
    (0..runs).map(|r| run_rng(master_seed, r)).collect()
}
