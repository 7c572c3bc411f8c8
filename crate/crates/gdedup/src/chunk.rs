//! Fixed-width bit vectors, the unit of deduplication.
//!
//! Bit positions are numbered `1..=n` from the right (least significant)
//! end, so the text form `0001000` has its set bit at position 4. When a
//! chunk is written to a bitstream the leftmost (highest) position goes
//! first, matching the text form read left to right.

use std::fmt;

use crate::bitstream::{BitReader, BitWriter};
use crate::error::{Error, Result};

pub const MAX_CHUNK_BITS: usize = 65535;

/// A bit vector of fixed length `1..=65535`.
///
/// Stored as little-endian 64-bit words: position `p` lives at bit
/// `(p - 1) % 64` of word `(p - 1) / 64`. Unused high bits of the last word
/// are always zero, so equality and hashing are structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Chunk {
    len: u32,
    words: Vec<u64>,
}

impl Chunk {
    /// The all-zero chunk of `len` bits.
    pub fn zero(len: usize) -> Self {
        assert!(
            (1..=MAX_CHUNK_BITS).contains(&len),
            "chunk length {len} out of range 1..={MAX_CHUNK_BITS}"
        );
        Self { len: len as u32, words: vec![0; len.div_ceil(64)] }
    }

    // A chunk is never empty, so there is no `is_empty`.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    /// Bit at 1-based position `pos`.
    pub fn bit(&self, pos: usize) -> bool {
        assert!(pos >= 1 && pos <= self.len(), "position {pos} out of 1..={}", self.len);
        self.words[(pos - 1) / 64] >> ((pos - 1) % 64) & 1 == 1
    }

    pub fn set_bit(&mut self, pos: usize, value: bool) {
        assert!(pos >= 1 && pos <= self.len(), "position {pos} out of 1..={}", self.len);
        let mask = 1u64 << ((pos - 1) % 64);
        if value {
            self.words[(pos - 1) / 64] |= mask;
        } else {
            self.words[(pos - 1) / 64] &= !mask;
        }
    }

    pub fn flip_bit(&mut self, pos: usize) {
        assert!(pos >= 1 && pos <= self.len(), "position {pos} out of 1..={}", self.len);
        self.words[(pos - 1) / 64] ^= 1u64 << ((pos - 1) % 64);
    }

    /// Bitwise XOR with another chunk of the same length.
    pub fn xor_with(&mut self, other: &Chunk) {
        assert_eq!(self.len, other.len, "chunk lengths differ");
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w ^= o;
        }
    }

    /// Hamming weight.
    pub fn weight(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// 1-based positions of the set bits, ascending.
    pub fn set_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + tz + 1)
            })
        })
    }

    /// Parses a chunk from its text form: leftmost character is the highest
    /// position. Only '0' and '1' are accepted.
    pub fn from_bit_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() > MAX_CHUNK_BITS {
            return Err(Error::InvalidChunkLength(s.len()));
        }
        let n = s.len();
        let mut chunk = Chunk::zero(n);
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => chunk.set_bit(n - i, true),
                _ => return Err(Error::InvalidParams("chunk strings may only contain 0 and 1")),
            }
        }
        Ok(chunk)
    }

    /// Writes all bits, highest position first.
    pub fn write_to(&self, writer: &mut BitWriter) -> Result<()> {
        let top = self.words.len() - 1;
        let top_width = self.len() - top * 64;
        writer.write_bits(self.words[top], top_width as u32)?;
        for word in self.words[..top].iter().rev() {
            writer.write_bits(*word, 64)?;
        }
        Ok(())
    }

    /// Reads a chunk of `len` bits, highest position first.
    pub fn read_from(reader: &mut BitReader<'_>, len: usize) -> Result<Self> {
        let mut chunk = Chunk::zero(len);
        let top = chunk.words.len() - 1;
        let top_width = len - top * 64;
        chunk.words[top] = reader.read_bits(top_width as u32)?;
        for word in chunk.words[..top].iter_mut().rev() {
            *word = reader.read_bits(64)?;
        }
        Ok(chunk)
    }
}

impl fmt::Display for Chunk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for pos in (1..=self.len()).rev() {
            f.write_str(if self.bit(pos) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Chunk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chunk({self})")
    }
}
