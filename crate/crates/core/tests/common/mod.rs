//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

pub mod compose;
pub mod explicit;
pub mod replay;

use agv_core::CheckConfig;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Bounds for the small randomized systems: one solver process pair per
/// check, the parallelism coming from the caller.
pub fn small_config() -> CheckConfig {
    CheckConfig {
        max_k: 6,
        bmc_depth: 12,
        jobs: 1,
        ..CheckConfig::default()
    }
}
