//! Stream derivation for reproducible parallel Monte Carlo.
//!
//! Every random draw in the crate comes from a ChaCha stream addressed by a
//! `(master seed, stream index)` pair, so results never depend on the order in
//! which rayon schedules work.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

/// Where a sample's randomness came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct SeedProvenance {
    pub master_seed: u64,
    pub stream: u64,
}

impl SeedProvenance {
    pub fn new(master_seed: u64, stream: u64) -> Self {
        Self {
            master_seed,
            stream,
        }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream);
        rng
    }

    /// A child stream that is statistically independent of `self`.
    pub fn child(&self, salt: u64) -> Self {
        Self {
            master_seed: mix(self.master_seed ^ mix(salt)),
            stream: self.stream,
        }
    }
}

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream index for trial `trial` of cell `cell`.
pub fn trial_stream(master_seed: u64, cell: u64, trial: u64) -> SeedProvenance {
    SeedProvenance::new(master_seed, mix(mix(cell) ^ trial.rotate_left(17)))
}
