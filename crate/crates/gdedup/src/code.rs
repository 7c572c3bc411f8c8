//! Base alphabets realized as binary Hamming codes.
//!
//! A Hamming code with `m` parity bits has chunk length `n = 2^m - 1`. The
//! parity-check matrix is the canonical one whose column for position `i`
//! is the m-bit binary representation of `i`, so the syndrome of a chunk is
//! literally the 1-based position of its flipped bit (0 for codewords).
//! That makes the syndrome a ready-made deviation index: the deviation set
//! is the n + 1 vectors of Hamming weight at most 1, indexed by the
//! position they set.
//!
//! The trivial code is also representable: every n-bit vector is a
//! codeword, the deviation set collapses to the zero vector, and the base
//! mapping is the identity. It is the code behind classic deduplication.

use crate::chunk::Chunk;
use crate::error::{Error, Result};

/// How bases are written to the coded stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KMode {
    /// All `n` bits of the base.
    Full,
    /// Only the `n - m` information bits; parity bits are re-derived.
    Compact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Trivial { n: usize },
    Hamming { m: u32, n: usize },
}

/// An immutable code instance: the base alphabet, the deviation indexing,
/// and the base representation width `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeSpec {
    kind: Kind,
    k_mode: KMode,
}

impl CodeSpec {
    /// The Hamming code with `m` parity bits, `2 <= m <= 16`.
    pub fn hamming(m: u32, k_mode: KMode) -> Result<Self> {
        if !(2..=16).contains(&m) {
            return Err(Error::UnsupportedParity(m));
        }
        Ok(Self { kind: Kind::Hamming { m, n: (1usize << m) - 1 }, k_mode })
    }

    /// The trivial code on `n`-bit chunks: identity mapping, no deviation.
    pub fn trivial(n: usize) -> Result<Self> {
        if !(1..=crate::chunk::MAX_CHUNK_BITS).contains(&n) {
            return Err(Error::InvalidChunkLength(n));
        }
        Ok(Self { kind: Kind::Trivial { n }, k_mode: KMode::Full })
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self.kind, Kind::Trivial { .. })
    }

    /// Chunk length in bits.
    pub fn n(&self) -> usize {
        match self.kind {
            Kind::Trivial { n } | Kind::Hamming { n, .. } => n,
        }
    }

    /// Parity bit count, for Hamming specs.
    pub fn m(&self) -> Option<u32> {
        match self.kind {
            Kind::Trivial { .. } => None,
            Kind::Hamming { m, .. } => Some(m),
        }
    }

    pub fn k_mode(&self) -> KMode {
        self.k_mode
    }

    /// Deviation width in bits: `m` for Hamming, 0 for the trivial code.
    pub fn q(&self) -> u32 {
        match self.kind {
            Kind::Trivial { .. } => 0,
            Kind::Hamming { m, .. } => m,
        }
    }

    /// Size of the deviation set: `n + 1` for Hamming, 1 for trivial.
    pub fn y_size(&self) -> u64 {
        match self.kind {
            Kind::Trivial { .. } => 1,
            Kind::Hamming { n, .. } => n as u64 + 1,
        }
    }

    /// Bits used to represent a base in the coded stream.
    pub fn k(&self) -> usize {
        match (self.kind, self.k_mode) {
            (Kind::Hamming { m, n }, KMode::Compact) => n - m as usize,
            _ => self.n(),
        }
    }

    /// log2 of the number of codewords: `n - m` for Hamming, `n` for the
    /// trivial code (every vector is a codeword).
    pub fn codeword_count_log2(&self) -> u32 {
        match self.kind {
            Kind::Trivial { n } => n as u32,
            Kind::Hamming { m, n } => n as u32 - m,
        }
    }

    fn check_len(&self, c: &Chunk) -> Result<()> {
        if c.len() != self.n() {
            return Err(Error::LengthMismatch { expected: self.n(), actual: c.len() });
        }
        Ok(())
    }

    /// Syndrome of a chunk under the canonical parity-check matrix: 0 for a
    /// codeword, otherwise the 1-based position whose flip yields one. The
    /// trivial code treats every chunk as a codeword.
    pub fn syndrome(&self, c: &Chunk) -> Result<u64> {
        self.check_len(c)?;
        match self.kind {
            Kind::Trivial { .. } => Ok(0),
            Kind::Hamming { .. } => {
                Ok(c.set_positions().fold(0u64, |acc, pos| acc ^ pos as u64))
            }
        }
    }

    pub fn is_codeword(&self, c: &Chunk) -> Result<bool> {
        Ok(self.syndrome(c)? == 0)
    }

    /// Minimum-distance mapping: returns the unique codeword within Hamming
    /// distance 1 of `c` together with the deviation index (the syndrome).
    pub fn map_to_base(&self, c: &Chunk) -> Result<(Chunk, u64)> {
        let s = self.syndrome(c)?;
        let mut base = c.clone();
        if s != 0 {
            base.flip_bit(s as usize);
        }
        Ok((base, s))
    }

    /// Reconstructs a chunk from a base and a deviation index; index 0
    /// leaves the base untouched. Inverse of [`CodeSpec::map_to_base`].
    pub fn apply_deviation(&self, base: &Chunk, index: u64) -> Result<Chunk> {
        self.check_len(base)?;
        let max = match self.kind {
            Kind::Trivial { .. } => 0,
            Kind::Hamming { n, .. } => n as u64,
        };
        if index > max {
            return Err(Error::DeviationOutOfRange { index, max });
        }
        let mut chunk = base.clone();
        if index != 0 {
            chunk.flip_bit(index as usize);
        }
        Ok(chunk)
    }

    /// The deviation vector for an index: all zeros with bit `index` set
    /// (index 0 is the zero vector).
    pub fn deviation(&self, index: u64) -> Result<Chunk> {
        self.apply_deviation(&Chunk::zero(self.n()), index)
    }

    /// Information bit positions, highest first: every position in `1..=n`
    /// that is not a power of two. Their order fixes the compact layout.
    pub fn info_positions(&self) -> Result<impl Iterator<Item = usize>> {
        match self.kind {
            Kind::Trivial { .. } => Err(Error::RequiresHamming),
            Kind::Hamming { n, .. } => {
                Ok((1..=n).rev().filter(|p| !p.is_power_of_two()))
            }
        }
    }

    /// Extracts the `n - m` information bits of a codeword as a `k`-bit
    /// vector (first-emitted bit highest).
    pub fn compact_base(&self, base: &Chunk) -> Result<Chunk> {
        self.check_len(base)?;
        if self.syndrome(base)? != 0 {
            return Err(Error::NotACodeword);
        }
        let k = self.codeword_count_log2() as usize;
        let mut out = Chunk::zero(k);
        for (i, pos) in self.info_positions()?.enumerate() {
            out.set_bit(k - i, base.bit(pos));
        }
        Ok(out)
    }

    /// Re-encodes `n - m` information bits into the unique codeword that
    /// carries them: place the information bits, then set parity bit `2^j`
    /// for every set bit `j` of the partial syndrome, which zeroes the
    /// total syndrome.
    pub fn expand_base(&self, info: &Chunk) -> Result<Chunk> {
        let k = match self.kind {
            Kind::Trivial { .. } => return Err(Error::RequiresHamming),
            Kind::Hamming { m, n } => n - m as usize,
        };
        if info.len() != k {
            return Err(Error::LengthMismatch { expected: k, actual: info.len() });
        }
        let mut base = Chunk::zero(self.n());
        for (i, pos) in self.info_positions()?.enumerate() {
            base.set_bit(pos, info.bit(k - i));
        }
        let s = self.syndrome(&base)?;
        let mut j = 0;
        while s >> j != 0 {
            if s >> j & 1 == 1 {
                base.flip_bit(1 << j);
            }
            j += 1;
        }
        debug_assert_eq!(self.syndrome(&base).unwrap(), 0);
        Ok(base)
    }
}
