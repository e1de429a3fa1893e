//! Counter-style random streams.
//!
//! Every replicate gets its own ChaCha stream addressed by
//! `(master seed, stream id)`, so scheduling order and worker count never
//! change the draws a replicate sees.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Stream for replicate `index` of cell `cell` under `seed`.
pub fn replicate_rng(seed: u64, cell: u32, index: u32) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((cell as u64) << 32) | index as u64);
    rng
}
