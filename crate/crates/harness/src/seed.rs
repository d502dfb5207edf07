//! Counter-mode seed derivation: trial i of a batch gets an independent
//! ChaCha8 stream seeded by `splitmix64(base ⊕ i·φ64)`.

/// The 64-bit golden-ratio constant used for counter spreading.
pub const COUNTER_SPREAD: u64 = 0x9E37_79B9_7F4A_7C15;

/// One round of splitmix64.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The declared derivation of the i-th trial seed from a base seed.
pub fn trial_seed(base: u64, index: u64) -> u64 {
    splitmix64(base ^ index.wrapping_mul(COUNTER_SPREAD))
}
