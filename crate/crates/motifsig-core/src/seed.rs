//! Deterministic seed derivation.
//!
//! Every randomized stage takes an explicit master seed; sub-streams (one per
//! ensemble sample, one per generated cluster, one per signed cluster) are
//! derived from it with a stateless mix so that work can be reordered or
//! parallelized without changing any result.

/// SplitMix64 finalizer. Bijective on `u64`.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the `index`-th sub-stream of `master`.
///
/// Distinct indices map to distinct seeds (the mix is bijective for a fixed
/// master).
pub fn derive(master: u64, index: u64) -> u64 {
    mix(master ^ mix(index))
}

/// Seed for a sub-stream identified by a string tag (e.g. a cluster id).
///
/// Stable under reordering of the inputs, so signing a corpus yields the same
/// signature for a cluster no matter where it sits in the file.
pub fn derive_tagged(master: u64, tag: &str) -> u64 {
    // FNV-1a over the tag bytes, then the same finalizer.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in tag.as_bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    mix(master ^ h)
}
