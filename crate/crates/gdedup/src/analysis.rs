//! Closed-form bounds on expected coded length, asymptotic per-chunk cost,
//! and convergence rates.
//!
//! For a source of `|X|` active bases, `|Y|` deviations, and bases written
//! in `k` bits, the expected coded length of `C` chunks is bracketed by
//!
//! ```text
//! theta_L = C (log2|Y| + 1)
//!         + sum_{c=1}^{C} [ k p(c) + (1 - p(c)) log2(|X| (1 - p(c))) ]
//! theta_U = C (log2|Y| + 3)
//!         + sum_{c=1}^{C} [ k p(c) + |X|^-1 min{(c-1) log2(c-1), |X| log2|X|} ]
//! ```
//!
//! where `p(c) = (1 - 1/|X|)^(c-1)` is the probability that chunk `c`
//! brings a new base, and `0 log 0 = 0`. Classic deduplication is the
//! substitution `X -> Z`, `Y -> {0}`, `k = n`, with the upper bound
//! tightened by `C` (no deviation field means one of the slack bits per
//! chunk disappears).
//!
//! Sums are evaluated by direct iteration with compensated (Kahan)
//! accumulation and per-term `powi`; chunk counts beyond 10^7 are rejected
//! rather than approximated.

use crate::codec::Mode;
use crate::error::{Error, Result};

/// Largest chunk count the summations will evaluate.
pub const MAX_BOUND_CHUNKS: u64 = 10_000_000;

/// Parameters of the length bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundParams {
    /// Number of chunks `C`.
    pub chunk_count: u64,
    /// Active base count `|X|`.
    pub x_size: u64,
    /// Deviation set size `|Y|`.
    pub y_size: u64,
    /// Bits per stored base.
    pub k: u32,
    /// Chunk length in bits.
    pub n: u32,
}

impl BoundParams {
    pub fn validate(&self) -> Result<()> {
        if self.x_size == 0 || self.y_size == 0 || self.n == 0 {
            return Err(Error::InvalidParams("sizes must be positive"));
        }
        if self.k > self.n {
            return Err(Error::InvalidParams("k cannot exceed the chunk length"));
        }
        if self.chunk_count > MAX_BOUND_CHUNKS {
            return Err(Error::ChunkCountTooLarge(self.chunk_count));
        }
        Ok(())
    }
}

/// A lower/upper bracket, in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundResult {
    pub lower: f64,
    pub upper: f64,
}

/// Probability that the `c`-th chunk's base is not yet in the dictionary:
/// `(1 - 1/|X|)^(c-1)`.
pub fn p_miss(c: u64, x_size: u64) -> f64 {
    debug_assert!(c >= 1 && x_size >= 1);
    (1.0 - 1.0 / x_size as f64).powi((c - 1) as i32)
}

#[derive(Debug, Clone, Copy, Default)]
struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    fn add(&mut self, value: f64) {
        let y = value - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum
    }
}

/// Incrementally evaluates `theta_L`/`theta_U` for growing `C`, one chunk
/// per step. Lets callers record a whole bound series in a single pass.
#[derive(Debug, Clone)]
pub struct ThetaAccumulator {
    x_size: u64,
    y_size: u64,
    k: u32,
    c: u64,
    lower: KahanSum,
    upper: KahanSum,
}

impl ThetaAccumulator {
    pub fn new(x_size: u64, y_size: u64, k: u32) -> Self {
        Self { x_size, y_size, k, c: 0, lower: KahanSum::default(), upper: KahanSum::default() }
    }

    /// Current chunk count `C`.
    pub fn chunk_count(&self) -> u64 {
        self.c
    }

    /// Advances from `C` to `C + 1` and returns the new cumulative bounds.
    pub fn step(&mut self) -> (f64, f64) {
        self.c += 1;
        let c = self.c;
        let x = self.x_size as f64;
        let log_y = (self.y_size as f64).log2();
        let k = f64::from(self.k);
        let p = p_miss(c, self.x_size);

        // 0 log 0 = 0 at c = 1, where the dictionary is surely empty.
        let hit = 1.0 - p;
        let lower_hit_term = if hit > 0.0 { hit * (x * hit).log2() } else { 0.0 };
        self.lower.add(log_y + 1.0 + k * p + lower_hit_term);

        // (c-1) log2(c-1) is 0 at both c = 1 and c = 2.
        let grown = if c <= 2 { 0.0 } else { ((c - 1) as f64) * ((c - 1) as f64).log2() };
        let cap = x * x.log2();
        self.upper.add(log_y + 3.0 + k * p + grown.min(cap) / x);

        (self.lower.value(), self.upper.value())
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lower.value(), self.upper.value())
    }
}

fn theta(p: &BoundParams) -> Result<(f64, f64)> {
    p.validate()?;
    let mut acc = ThetaAccumulator::new(p.x_size, p.y_size, p.k);
    for _ in 0..p.chunk_count {
        acc.step();
    }
    Ok(acc.bounds())
}

/// Lower bound `theta_L` on the expected generalized-deduplication length.
pub fn theta_lower(p: &BoundParams) -> Result<f64> {
    Ok(theta(p)?.0)
}

/// Upper bound `theta_U` on the expected generalized-deduplication length.
pub fn theta_upper(p: &BoundParams) -> Result<f64> {
    Ok(theta(p)?.1)
}

/// Bounds for classic deduplication of `C` chunks from a `|Z|`-chunk
/// alphabet: `theta` with `X -> Z`, `Y -> {0}`, `k = n`, upper bound
/// reduced by `C`.
pub fn dedup_bounds(chunk_count: u64, z_size: u64, n: u32) -> Result<BoundResult> {
    let p = BoundParams { chunk_count, x_size: z_size, y_size: 1, k: n, n };
    let (lower, upper) = theta(&p)?;
    Ok(BoundResult { lower, upper: upper - chunk_count as f64 })
}

/// Asymptotic cost of one additional chunk, in bits, once the dictionary
/// has converged: within [H(Z)+1, H(Z)+3] generalized, [H(Z)+1, H(Z)+2]
/// classic.
pub fn asymptotic_cost(h_z: f64, mode: Mode) -> BoundResult {
    match mode {
        Mode::Generalized => BoundResult { lower: h_z + 1.0, upper: h_z + 3.0 },
        Mode::Classic => BoundResult { lower: h_z + 1.0, upper: h_z + 2.0 },
    }
}

/// Linear convergence rate of the miss probability: `1 - 1/|X|` for the
/// generalization, `1 - 1/|Z|` for classic deduplication. Smaller is
/// faster.
pub fn convergence_rate(mode: Mode, x_size: u64, z_size: u64) -> f64 {
    match mode {
        Mode::Generalized => 1.0 - 1.0 / x_size as f64,
        Mode::Classic => 1.0 - 1.0 / z_size as f64,
    }
}

/// Envelope for the generalization ratio `G(C) = R_D(C) / R_G(C)`:
/// dividing the classic bounds by the opposing generalized bounds.
pub fn ratio_bounds(p: &BoundParams) -> Result<BoundResult> {
    if p.chunk_count == 0 {
        return Err(Error::InvalidParams("ratio bounds need at least one chunk"));
    }
    let (gen_lower, gen_upper) = theta(p)?;
    let dedup = dedup_bounds(p.chunk_count, p.x_size * p.y_size, p.n)?;
    Ok(BoundResult { lower: dedup.lower / gen_upper, upper: dedup.upper / gen_lower })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::DetRng;

    fn example_params(chunk_count: u64) -> BoundParams {
        // The 16-chunk source: |X| = 2, |Y| = 8, k = n = 7.
        BoundParams { chunk_count, x_size: 2, y_size: 8, k: 7, n: 7 }
    }

    #[test]
    fn miss_probability_values() {
        assert_eq!(p_miss(1, 2), 1.0);
        assert_eq!(p_miss(1, 999), 1.0);
        assert_eq!(p_miss(2, 2), 0.5);
        assert_eq!(p_miss(3, 8), 0.765625); // (7/8)^2 by hand
    }

    #[test]
    fn miss_probability_decays_geometrically() {
        // p(c+1) / p(c) equals the convergence rate; exact in binary
        // arithmetic while the powers stay representable.
        for c in 1..=18u64 {
            assert_eq!(p_miss(c + 1, 8) / p_miss(c, 8), 0.875, "c={c}");
        }
        let mu = convergence_rate(Mode::Generalized, 10, 0);
        for c in [1u64, 5, 50, 500, 5000] {
            let ratio = p_miss(c + 1, 10) / p_miss(c, 10);
            assert!((ratio - mu).abs() < 1e-12, "c={c}");
        }
    }

    #[test]
    fn theta_hand_evaluations() {
        assert_eq!(theta_lower(&example_params(1)).unwrap(), 11.0);
        assert_eq!(theta_upper(&example_params(1)).unwrap(), 13.0);
        assert_eq!(theta_lower(&example_params(0)).unwrap(), 0.0);
        assert_eq!(theta_upper(&example_params(0)).unwrap(), 0.0);
    }

    #[test]
    fn dedup_hand_evaluations() {
        let b = dedup_bounds(1, 16, 7).unwrap();
        assert_eq!(b.lower, 8.0);
        assert_eq!(b.upper, 9.0);
        let b = dedup_bounds(0, 16, 7).unwrap();
        assert_eq!((b.lower, b.upper), (0.0, 0.0));
    }

    #[test]
    fn asymptotic_costs() {
        let g = asymptotic_cost(4.0, Mode::Generalized);
        assert_eq!(g.lower, 5.0);
        let g = asymptotic_cost(8.0, Mode::Generalized);
        assert_eq!((g.lower, g.upper), (9.0, 11.0));
        let d = asymptotic_cost(8.0, Mode::Classic);
        assert_eq!((d.lower, d.upper), (9.0, 10.0));
        let z = asymptotic_cost(0.0, Mode::Generalized);
        assert_eq!((z.lower, z.upper), (1.0, 3.0));
        let z = asymptotic_cost(0.0, Mode::Classic);
        assert_eq!((z.lower, z.upper), (1.0, 2.0));
    }

    #[test]
    fn convergence_rates() {
        assert_eq!(convergence_rate(Mode::Generalized, 2, 16), 0.5);
        assert_eq!(convergence_rate(Mode::Classic, 8, 256), 0.99609375);
        // Classic can never converge faster than the generalization.
        let mut rng = DetRng::new(1);
        for _ in 0..100 {
            let x = 1 + rng.below(1000);
            let z = x * (1 + rng.below(64));
            assert!(
                convergence_rate(Mode::Classic, x, z)
                    >= convergence_rate(Mode::Generalized, x, z)
            );
        }
    }

    #[test]
    fn ratio_envelope_at_one_chunk() {
        let b = ratio_bounds(&example_params(1)).unwrap();
        assert!((b.lower - 8.0 / 13.0).abs() < 1e-12);
        assert!((b.upper - 9.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn bounds_sandwich_for_random_parameters() {
        let mut rng = DetRng::new(7);
        for _ in 0..200 {
            let n = 2 + rng.below(1000) as u32;
            let p = BoundParams {
                chunk_count: 1 + rng.below(300),
                x_size: 1 + rng.below(500),
                y_size: 1 + rng.below(u64::from(n)),
                k: 1 + rng.below(u64::from(n)) as u32,
                n,
            };
            let lower = theta_lower(&p).unwrap();
            let upper = theta_upper(&p).unwrap();
            assert!(lower <= upper, "{p:?}");
            let d = dedup_bounds(p.chunk_count, p.x_size * p.y_size, p.n).unwrap();
            assert!(d.lower <= d.upper, "{p:?}");
            let r = ratio_bounds(&p).unwrap();
            assert!(r.lower <= r.upper, "{p:?}");
        }
    }

    #[test]
    fn accumulator_matches_one_shot_evaluation() {
        let mut acc = ThetaAccumulator::new(8, 32, 31);
        for c in 1..=64u64 {
            let (lower, upper) = acc.step();
            let p = BoundParams { chunk_count: c, x_size: 8, y_size: 32, k: 31, n: 31 };
            assert_eq!(lower, theta_lower(&p).unwrap());
            assert_eq!(upper, theta_upper(&p).unwrap());
        }
    }

    #[test]
    fn increments_converge_to_the_asymptotic_costs() {
        // At C = 10^4 the per-chunk increments of the bounds sit within
        // 10^-3 bits of H(Z)+1 and H(Z)+3 for the 256-chunk source.
        let mut acc = ThetaAccumulator::new(8, 32, 31);
        let mut prev = (0.0, 0.0);
        for _ in 0..9_999 {
            prev = acc.step();
        }
        let last = acc.step();
        let h_z = 8.0;
        assert!((last.0 - prev.0 - (h_z + 1.0)).abs() < 1e-3);
        assert!((last.1 - prev.1 - (h_z + 3.0)).abs() < 1e-3);
    }

    #[test]
    fn chunk_counts_beyond_the_limit_are_rejected() {
        let p = BoundParams {
            chunk_count: MAX_BOUND_CHUNKS + 1,
            x_size: 2,
            y_size: 8,
            k: 7,
            n: 7,
        };
        assert!(matches!(theta_lower(&p), Err(Error::ChunkCountTooLarge(_))));
    }

    #[test]
    fn single_base_degenerate_source() {
        // |X| = 1: every chunk after the first is a guaranteed hit.
        let p = BoundParams { chunk_count: 10, x_size: 1, y_size: 8, k: 7, n: 7 };
        assert_eq!(theta_lower(&p).unwrap(), 10.0 * 4.0 + 7.0);
        assert_eq!(theta_upper(&p).unwrap(), 10.0 * 6.0 + 7.0);
    }
}
