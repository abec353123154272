//! Counter-based stream derivation.
//!
//! Every random draw is addressed by `(run seed, tree index, slot)`:
//! the run seed keys a ChaCha8 generator, the tree index selects the ChaCha
//! stream, and the slot selects a disjoint block of the keystream (slot 0
//! for the bootstrap sample, slot `k + 1` for node `k` in preorder). Draws
//! therefore never depend on which worker trains which tree.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const SLOT_BITS: u32 = 36;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of run `index` under `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

pub fn stream(seed: u64, tree: usize, slot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tree as u64);
    rng.set_word_pos(u128::from(slot) << SLOT_BITS);
    rng
}

pub fn bootstrap_stream(seed: u64, tree: usize) -> ChaCha8Rng {
    stream(seed, tree, 0)
}

pub fn node_stream(seed: u64, tree: usize, node: usize) -> ChaCha8Rng {
    stream(seed, tree, node as u64 + 1)
}
