//! Deterministic seed derivation.
//!
//! Every random choice in the crate flows through a 64-bit seed derived here
//! with SplitMix64 mixing, then expanded into a ChaCha8 stream. ChaCha8 is
//! stable across platforms and `rand_chacha` versions, so identical inputs
//! replay bit-identically anywhere. This fixes one concrete choice of the
//! otherwise-abstract seed distribution a randomized weak learner may draw
//! from; the weak-learner contract does not constrain it.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A 64-bit random seed handed to weak learners and samplers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed(pub u64);

impl Seed {
    pub fn value(self) -> u64 {
        self.0
    }

    /// Derive a child seed from this one and a path of integer parts.
    pub fn derive(self, parts: &[u64]) -> Seed {
        Seed(derive(self.0, parts))
    }

    /// A ChaCha8 stream seeded from this value.
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(GOLDEN);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based derivation: fold the parts (length-prefixed) into the root.
pub fn derive(root: u64, parts: &[u64]) -> u64 {
    let mut state = splitmix64(root);
    state = splitmix64(state ^ (parts.len() as u64).wrapping_mul(GOLDEN));
    for &part in parts {
        state = splitmix64(state ^ part.wrapping_mul(GOLDEN));
    }
    state
}
