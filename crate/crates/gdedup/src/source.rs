//! Synthetic chunk source: a set of active bases plus low-weight deviations.
//!
//! The chunk alphabet is `Z = X xor Y`, where `X` is a set of active
//! codewords and `Y` is the deviation set of the governing code. Because
//! the code's spheres are disjoint, `|Z| = |X| * |Y|` and drawing a chunk
//! uniformly from `Z` is the same as drawing a base and a deviation
//! uniformly and independently. Sampling does exactly that: one bounded
//! draw for the base index, then one for the deviation index.

use crate::chunk::Chunk;
use crate::code::CodeSpec;
use crate::error::{Error, Result};
use crate::rng::DetRng;

/// An immutable source configuration: the code, the active bases, and the
/// seed that selected them.
#[derive(Debug, Clone)]
pub struct SourceConfig {
    spec: CodeSpec,
    bases: Vec<Chunk>,
    seed: u64,
}

impl SourceConfig {
    /// Builds a source from explicitly given active bases. The bases must
    /// be distinct codewords of `spec`.
    pub fn with_bases(spec: CodeSpec, bases: Vec<Chunk>, seed: u64) -> Result<Self> {
        if bases.is_empty() {
            return Err(Error::InvalidBases);
        }
        let mut seen = std::collections::HashSet::new();
        for base in &bases {
            if base.len() != spec.n() || !spec.is_codeword(base)? || !seen.insert(base.clone()) {
                return Err(Error::InvalidBases);
            }
        }
        Ok(Self { spec, bases, seed })
    }

    /// Selects `active_count` distinct codewords uniformly at random,
    /// deterministically from `seed`.
    ///
    /// When the codeword index space fits in 128 bits the subset comes from
    /// a sparse partial Fisher-Yates shuffle over codeword indices; beyond
    /// that (m >= 8) indices no longer fit machine integers, so distinct
    /// codewords are drawn by rejection, which is uniform as well since the
    /// space dwarfs any feasible `active_count`.
    pub fn build(spec: CodeSpec, active_count: u64, seed: u64) -> Result<Self> {
        let log2_space = spec.codeword_count_log2();
        if active_count == 0
            || (log2_space < 64 && u128::from(active_count) > 1u128 << log2_space)
        {
            return Err(Error::TooManyBases {
                requested: active_count,
                available: if log2_space < 128 { 1u128 << log2_space } else { u128::MAX },
            });
        }
        let mut rng = DetRng::new(seed);
        let bases = if log2_space < 128 {
            let space = 1u128 << log2_space;
            // Sparse partial Fisher-Yates: swap targets tracked in a map.
            let mut swapped: std::collections::HashMap<u128, u128> = Default::default();
            let mut picked = Vec::with_capacity(active_count as usize);
            for i in 0..u128::from(active_count) {
                let j = i + rng.below_u128(space - i);
                let chosen = swapped.get(&j).copied().unwrap_or(j);
                let displaced = swapped.get(&i).copied().unwrap_or(i);
                swapped.insert(j, displaced);
                picked.push(chosen);
            }
            picked
                .into_iter()
                .map(|index| codeword_from_index(&spec, index))
                .collect::<Result<Vec<_>>>()?
        } else {
            let mut seen = std::collections::HashSet::new();
            let mut picked = Vec::with_capacity(active_count as usize);
            while picked.len() < active_count as usize {
                let cw = random_codeword(&spec, &mut rng)?;
                if seen.insert(cw.clone()) {
                    picked.push(cw);
                }
            }
            picked
        };
        Ok(Self { spec, bases, seed })
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn bases(&self) -> &[Chunk] {
        &self.bases
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn x_size(&self) -> u64 {
        self.bases.len() as u64
    }

    /// `|Z| = |X| * |Y|`.
    pub fn z_size(&self) -> u64 {
        self.x_size() * self.spec.y_size()
    }

    /// Source entropy in bits per chunk: `log2 |Z|`.
    pub fn entropy_bits(&self) -> f64 {
        (self.z_size() as f64).log2()
    }

    /// Draws one chunk uniformly from `Z`: a uniform base index, then a
    /// uniform deviation index, in that order on the rng stream.
    pub fn sample_chunk(&self, rng: &mut DetRng) -> Chunk {
        let base = &self.bases[rng.below(self.x_size()) as usize];
        let dev = rng.below(self.spec.y_size());
        let mut chunk = base.clone();
        if dev != 0 {
            chunk.flip_bit(dev as usize);
        }
        chunk
    }

    /// All chunks of `Z`, each exactly once: bases in insertion order,
    /// deviation indices ascending within each base.
    pub fn enumerate_chunks(&self) -> Result<Vec<Chunk>> {
        if self.z_size() > 1 << 20 {
            return Err(Error::SourceTooLarge(u128::from(self.z_size())));
        }
        let mut out = Vec::with_capacity(self.z_size() as usize);
        for base in &self.bases {
            for dev in 0..self.spec.y_size() {
                let mut chunk = base.clone();
                if dev != 0 {
                    chunk.flip_bit(dev as usize);
                }
                out.push(chunk);
            }
        }
        Ok(out)
    }
}

/// Convenience constructor used by the CLI and harness: a full-`k` Hamming
/// source with randomly selected active bases.
pub fn build_source(m: u32, active_count: u64, seed: u64) -> Result<SourceConfig> {
    SourceConfig::build(CodeSpec::hamming(m, crate::code::KMode::Full)?, active_count, seed)
}

/// Codeword whose information bits are the binary digits of `index`
/// (highest info position = most significant digit).
fn codeword_from_index(spec: &CodeSpec, index: u128) -> Result<Chunk> {
    if spec.is_trivial() {
        let n = spec.n();
        let mut chunk = Chunk::zero(n);
        for pos in 1..=n {
            if pos <= 128 && index >> (pos - 1) & 1 == 1 {
                chunk.set_bit(pos, true);
            }
        }
        return Ok(chunk);
    }
    let k = spec.codeword_count_log2() as usize;
    let mut info = Chunk::zero(k);
    for pos in 1..=k {
        if index >> (pos - 1) & 1 == 1 {
            info.set_bit(pos, true);
        }
    }
    spec.expand_base(&info)
}

/// Codeword with uniformly random information bits.
fn random_codeword(spec: &CodeSpec, rng: &mut DetRng) -> Result<Chunk> {
    let k = spec.codeword_count_log2() as usize;
    let mut info = Chunk::zero(k);
    let mut pos = 1;
    while pos <= k {
        let word = rng.next_u64();
        for bit in 0..64 {
            if pos > k {
                break;
            }
            info.set_bit(pos, word >> bit & 1 == 1);
            pos += 1;
        }
    }
    if spec.is_trivial() {
        Ok(info)
    } else {
        spec.expand_base(&info)
    }
}
