//! Deterministic random number generation for reproducible experiments.
//!
//! The generator is SplitMix64, pinned here by its update function so any
//! implementation (in any language) can replay a stream from a seed:
//!
//! ```text
//! state += 0x9E3779B97F4A7C15                      (mod 2^64)
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9          (mod 2^64)
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB          (mod 2^64)
//! output = z ^ (z >> 31)
//! ```
//!
//! Bounded draws use unbiased modulo rejection: draw 64 (or 128) bits, retry
//! while the draw falls in the short zone `[0, 2^w mod bound)`, then reduce
//! modulo the bound.

/// Seeded deterministic generator. One instance per sampling stream.
#[derive(Debug, Clone)]
pub struct DetRng {
    state: u64,
}

impl DetRng {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from `[0, bound)`. `bound` must be nonzero.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be nonzero");
        // 2^64 mod bound, computed without overflow.
        let zone = bound.wrapping_neg() % bound;
        loop {
            let x = self.next_u64();
            if x >= zone {
                return x % bound;
            }
        }
    }

    /// Uniform draw from `[0, bound)` for bounds beyond 64 bits.
    pub fn below_u128(&mut self, bound: u128) -> u128 {
        assert!(bound > 0, "bound must be nonzero");
        let zone = bound.wrapping_neg() % bound;
        loop {
            let x = ((self.next_u64() as u128) << 64) | self.next_u64() as u128;
            if x >= zone {
                return x % bound;
            }
        }
    }
}
