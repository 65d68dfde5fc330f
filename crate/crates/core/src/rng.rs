//! Seeded, counter-based random streams.
//!
//! Every random decision in the crate draws from a ChaCha8 stream whose key
//! is derived from `(master seed, run index, purpose tag)`. Streams never
//! depend on scheduling, so batch results are reproducible for any worker
//! count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type StreamRng = ChaCha8Rng;

/// Derives an independent stream from a master seed, a run index and a tag.
pub fn stream(master: u64, run: u64, tag: &str) -> StreamRng {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update(run.to_le_bytes());
    hasher.update((tag.len() as u64).to_le_bytes());
    hasher.update(tag.as_bytes());
    let digest = hasher.finalize();
    let mut seed = [0u8; 32];
    seed.copy_from_slice(&digest[..32]);
    ChaCha8Rng::from_seed(seed)
}

/// Derives a child seed from a parent stream for sub-tasks (e.g. one per
/// pool candidate).
pub fn child_seed(master: u64, run: u64, tag: &str, index: u64) -> u64 {
    use rand::RngCore;
    let mut rng = stream(master, run, tag);
    rng.set_stream(index);
    rng.next_u64()
}
