//! Stable derivation of RNG sub-seeds.
//!
//! Every random stream in the crate is keyed by a `u64` derived from the
//! master seed through [`mix`]. The mixer is a fixed splitmix64 finalizer,
//! written out here (rather than, say, `DefaultHasher`) because the exact
//! bit pattern is part of the reproducibility contract: a manifest replayed
//! on a future toolchain must yield identical runs.

/// splitmix64 output function (Steele, Lea, Flood 2014).
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes `tag` into `seed`, producing an independent-looking sub-seed.
///
/// Chained calls build hierarchical streams:
/// `mix(mix(master, GEN), index)` and so on. The function is not
/// commutative and distinct tag sequences give distinct streams.
pub fn mix(seed: u64, tag: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ splitmix64(tag.wrapping_add(0xA076_1D64_78BD_642F)))
}
