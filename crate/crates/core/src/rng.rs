//! Seed derivation.
//!
//! Every randomized object (a vertex in H1, an edge in H2, a trial in an
//! experiment, an attempt of a walk) draws from its own ChaCha8 stream.  The
//! stream seed is `mix(master, domain, index)`, where `mix` chains the
//! SplitMix64 finalizer over the three words.  Because streams are keyed by
//! object index rather than by draw order, generation can be split across
//! threads and still reproduce the sequential output bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Domain tags keep streams of different consumers disjoint.
pub mod domain {
    pub const H1_VERTEX: u64 = 0x01;
    pub const H2_EDGE: u64 = 0x02;
    pub const H2_EVEN_EDGE: u64 = 0x03;
    pub const RESAMPLE_EDGE: u64 = 0x04;
    pub const RANDOM_COLORING: u64 = 0x05;
    pub const WALK_ATTEMPT: u64 = 0x06;
    pub const NORM_START: u64 = 0x07;
    pub const PIPELINE_ROUND: u64 = 0x08;
    pub const EXPERIMENT_TRIAL: u64 = 0x09;
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a master seed with two keys into a child seed.
pub fn mix(seed: u64, a: u64, b: u64) -> u64 {
    let h = splitmix64(seed);
    let h = splitmix64(h ^ a.wrapping_mul(GOLDEN));
    splitmix64(h ^ b.rotate_left(32))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomSource {
    pub master_seed: u64,
}

impl RandomSource {
    pub fn new(master_seed: u64) -> Self {
        RandomSource { master_seed }
    }

    /// Independent generator for object `index` within `domain`.
    pub fn stream(&self, domain: u64, index: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(mix(self.master_seed, domain, index))
    }

    /// A child source whose streams are disjoint from this one's.
    pub fn derive(&self, domain: u64, index: u64) -> RandomSource {
        RandomSource::new(mix(self.master_seed, domain, index))
    }
}
