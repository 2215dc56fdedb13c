//! Counter-based pseudorandom stream, version 1 (`ctr64-v1`).
//!
//! Output `i` of the stream with key `seed` is
//!
//! ```text
//! z = seed + (i + 1) * 0x9E3779B97F4A7C15            (wrapping u64)
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! z =  z ^ (z >> 31)
//! ```
//!
//! which is the SplitMix64 finalizer applied to a Weyl counter. Uniform
//! doubles take the top 53 bits: `(z >> 11) * 2^-53`, giving values in [0, 1).
//! Any draw can be computed independently of the others, so batches are
//! reproducible byte for byte in any language with wrapping 64-bit integers.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    seed: u64,
}

impl CounterRng {
    pub const VERSION: &'static str = "ctr64-v1";

    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// Raw 64-bit output at position `counter`.
    #[inline]
    pub fn u64_at(&self, counter: u64) -> u64 {
        mix64(
            self.seed
                .wrapping_add(counter.wrapping_add(1).wrapping_mul(GOLDEN)),
        )
    }

    /// Uniform double in [0, 1) at position `counter`.
    #[inline]
    pub fn f64_at(&self, counter: u64) -> f64 {
        (self.u64_at(counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Derive an independent child seed.
    pub fn derive(&self, counter: u64) -> u64 {
        self.u64_at(counter ^ 0xD1B5_4A32_D192_ED03)
    }
}
