//! Counter-based seeding so parallel and serial sweeps agree bit-exactly.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Derives an independent RNG stream from a base seed, a lemma/context tag
/// and a trial counter. Streams for distinct (tag, counter) pairs are
/// statistically independent, and the mapping is stable across runs.
pub fn trial_rng(seed: u64, tag: &str, counter: u64) -> ChaCha8Rng {
    let mut h: u64 = 0xcbf29ce484222325 ^ seed.rotate_left(17);
    for b in tag.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h ^= counter.wrapping_mul(0x9e3779b97f4a7c15);
    h = h.wrapping_mul(0x100000001b3);
    ChaCha8Rng::seed_from_u64(h)
}
