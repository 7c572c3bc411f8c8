//! Shared test oracles, kept independent of the library's evaluation path.
//!
//! The bound oracles recompute the miss probability with exact rational
//! arithmetic (repeated exact multiplication by `(x-1)/x`) and only drop to
//! floating point for the logarithms of exactly-known rational values. The
//! library instead uses `powi` per term with compensated summation, so
//! agreement between the two is a real cross-check.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub struct RationalMiss {
    mu: BigRational,
    p: BigRational,
}

impl RationalMiss {
    pub fn new(x: u64) -> Self {
        let x = BigRational::from_integer(BigInt::from(x));
        Self { mu: (x.clone() - BigRational::one()) / x, p: BigRational::one() }
    }

    /// Exact `p(c)` for the current chunk, then advances to `c + 1`.
    pub fn next(&mut self) -> BigRational {
        let current = self.p.clone();
        self.p *= self.mu.clone();
        current
    }
}

/// Term-by-term `theta_L` with exact rational miss probabilities.
pub fn oracle_theta_lower(c_max: u64, x: u64, y: u64, k: u32) -> f64 {
    let xf = x as f64;
    let log_y = (y as f64).log2();
    let mut miss = RationalMiss::new(x);
    let mut total = 0.0;
    for _ in 1..=c_max {
        let p = miss.next();
        let hit = BigRational::one() - p.clone();
        let hit_term = if hit.is_zero() {
            0.0
        } else {
            let hit_f = hit.to_f64().expect("hit probability fits f64");
            hit_f * (xf * hit_f).log2()
        };
        total += log_y + 1.0 + f64::from(k) * p.to_f64().expect("p fits f64") + hit_term;
    }
    total
}

/// Term-by-term `theta_U` with exact rational miss probabilities.
pub fn oracle_theta_upper(c_max: u64, x: u64, y: u64, k: u32) -> f64 {
    let xf = x as f64;
    let log_y = (y as f64).log2();
    let cap = xf * xf.log2();
    let mut miss = RationalMiss::new(x);
    let mut total = 0.0;
    for c in 1..=c_max {
        let p = miss.next();
        let grown =
            if c <= 2 { 0.0 } else { ((c - 1) as f64) * ((c - 1) as f64).log2() };
        total += log_y + 3.0 + f64::from(k) * p.to_f64().expect("p fits f64")
            + grown.min(cap) / xf;
    }
    total
}

/// Classic-deduplication bracket: `theta` at `X -> Z`, `Y -> {0}`, `k = n`,
/// upper bound lowered by `C`.
pub fn oracle_dedup_bounds(c_max: u64, z: u64, n: u32) -> (f64, f64) {
    (
        oracle_theta_lower(c_max, z, 1, n),
        oracle_theta_upper(c_max, z, 1, n) - c_max as f64,
    )
}
