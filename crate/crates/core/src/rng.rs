//! Seed handling.
//!
//! Every random object is built from an explicit 64-bit seed. Each sketch
//! family draws from its own ChaCha stream (the stream id is the counter
//! nonce), so introducing a new family or component never shifts the values
//! another one sees for the same seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) mod stream {
    pub const SPARSE_BUCKET: u64 = 0x0101;
    pub const SPARSE_SIGN: u64 = 0x0102;
    pub const GEN_OUTER: u64 = 0x0201;
    pub const GEN_INNER: u64 = 0x0202;
    pub const SRHT_SIGN: u64 = 0x0301;
    pub const SRHT_ROWS: u64 = 0x0302;
    pub const SAMPLER: u64 = 0x0401;
    pub const GAUSSIAN: u64 = 0x0501;
    pub const TEST_DATA: u64 = 0x0f01;
}

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derives an independent child seed (splitmix64 finalizer over `seed ^ tag`).
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A general-purpose generator for data synthesis (test instances, corpora).
pub fn data_rng(seed: u64) -> ChaCha8Rng {
    stream_rng(seed, stream::TEST_DATA)
}
