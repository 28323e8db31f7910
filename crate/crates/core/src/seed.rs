//! Stable per-trial seed derivation.
//!
//! Substream seeds are a SplitMix64-style hash of the master seed and a list
//! of integer coordinates, so any subset of a sweep reproduces exactly the
//! streams it would have drawn inside the full sweep.

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// Hashes `master` together with `coords` into a 64-bit seed.
pub fn derive_seed(master: u64, coords: &[u64]) -> u64 {
    let mut h = mix64(master.wrapping_add(GOLDEN));
    for (i, &c) in coords.iter().enumerate() {
        h = mix64(h ^ mix64(c.wrapping_add(GOLDEN.wrapping_mul(i as u64 + 2))));
    }
    h
}
