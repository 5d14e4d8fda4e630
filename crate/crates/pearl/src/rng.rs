//! Seeded RNG streams.
//!
//! All randomness flows from explicit seeds. Batch runs derive one
//! independent stream per trial from (master seed, trial index) so trials
//! can run in any order, or in parallel, with identical results.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type PearlRng = ChaCha8Rng;

pub fn master_rng(seed: u64) -> PearlRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for one trial of a batch.
pub fn trial_rng(seed: u64, trial: u64) -> PearlRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial.wrapping_add(1));
    rng
}
