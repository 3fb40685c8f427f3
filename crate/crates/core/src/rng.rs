//! Counter-based random streams.
//!
//! Every draw is addressed by `(seed, coordinate, chunk)`: the ChaCha key is
//! derived from the seed and the 64-bit stream id packs the coordinate index
//! and the chunk index. Chunks of [`CHUNK`] draws are filled independently,
//! so parallel and sequential runs are bitwise identical.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const CHUNK: usize = 4096;

pub fn stream(seed: u64, coordinate: u32, chunk: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((coordinate as u64) << 32) | chunk as u64);
    rng
}

/// Fills `out` chunk by chunk, each chunk from its own stream.
pub fn fill_chunked<F>(out: &mut [f64], seed: u64, coordinate: u32, fill: F)
where
    F: Fn(&mut ChaCha8Rng, &mut [f64]) + Sync,
{
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, slot)| {
        let mut rng = stream(seed, coordinate, c as u32);
        fill(&mut rng, slot);
    });
}
