//! Seed derivation for independent per-task RNG streams.

/// Derives a child seed from a master seed and a task index via a
/// splitmix64 step, so each subset / repetition owns its own stream and
/// results do not depend on scheduling order.
pub(crate) fn child_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
