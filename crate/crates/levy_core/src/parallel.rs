//! Deterministic data-parallel fan-out over fixed-size chunks.
//!
//! Chunk `i` always draws from stream `i` of a ChaCha8 generator seeded with the
//! run seed, so results do not depend on the thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::ops::Range;

pub const CHUNK: usize = 4096;

pub fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

/// Applies `f` to consecutive index ranges covering `0..n`, in chunk order.
pub fn map_chunks<T, F>(n: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>, &mut ChaCha8Rng) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(n);
            let mut rng = chunk_rng(seed, c);
            f(lo..hi, &mut rng)
        })
        .collect()
}
