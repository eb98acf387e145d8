//! Hierarchical, reproducible RNG streams.
//!
//! A [`StreamId`] names one ChaCha8 stream. Child streams are derived by
//! mixing an index into the parent id, so every replicate of a study owns an
//! independent generator whatever order the work is scheduled in.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamId(pub u64);

impl StreamId {
    pub fn new(seed: u64) -> Self {
        StreamId(seed)
    }

    /// Child stream `index` of this stream.
    pub fn derive(self, index: u64) -> Self {
        StreamId(splitmix64(self.0 ^ splitmix64(index.wrapping_add(0x9E37_79B9_7F4A_7C15))))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

impl From<u64> for StreamId {
    fn from(seed: u64) -> Self {
        StreamId(seed)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
