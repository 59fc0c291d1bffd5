//! Seeded random streams.
//!
//! Every stochastic routine draws from a [`ChaCha8Rng`]. Parallel work uses
//! sub-streams derived from a root seed by [`substream`]: the ChaCha key is
//! the root seed and the 64-bit stream id selects an independent keystream,
//! so sub-stream `i` of seed `s` is the same no matter how many threads run.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

/// The root stream for `seed`.
pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent sub-stream `index` of the root `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

/// Fixed chunk size used to split `n` draws across sub-streams.
pub const CHUNK: usize = 1 << 16;

/// `(start, len)` of each chunk covering `0..n`.
pub fn chunks(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n.div_ceil(CHUNK)).map(move |c| {
        let start = c * CHUNK;
        (start, CHUNK.min(n - start))
    })
}
