//! Seeded random streams.
//!
//! Every stochastic computation takes a master seed and derives independent
//! ChaCha streams from it, one per worker chunk or grid point, so results do
//! not depend on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Generator for stream `stream` of master seed `seed`.
pub fn stream(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mixes a master seed with an index into a fresh seed (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Splits `total` trials into fixed-size chunks. The chunking depends only on
/// `total`, never on the thread count.
pub fn chunks(total: usize, chunk: usize) -> Vec<(u64, usize)> {
    let chunk = chunk.max(1);
    (0..total.div_ceil(chunk))
        .map(|i| (i as u64, chunk.min(total - i * chunk)))
        .collect()
}
