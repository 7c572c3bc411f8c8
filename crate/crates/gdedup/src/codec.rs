//! Streaming encoder/decoder for generalized and classic deduplication.
//!
//! Per chunk the coded record is:
//!
//! ```text
//! flag 1 + base (k bits)                + deviation (q bits)   new base
//! flag 0 + pointer (ceil(log2 |D|) bits) + deviation (q bits)   known base
//! ```
//!
//! The dictionary `D` is the insertion-ordered set of bases seen so far;
//! pointers are 0-based insertion indices, fixed-width at the dictionary
//! size *before* the current chunk (a dictionary of one entry needs zero
//! pointer bits). Classic deduplication is the same scheme with every chunk
//! acting as its own base and no deviation field; it must produce exactly
//! the same bits as the generalized coder running on the trivial code.
//!
//! No delimiters are needed: the flag, the dictionary size, `k`, and `q`
//! fully determine the parse.

use std::collections::HashMap;

use crate::bitstream::{BitBuffer, BitReader, BitWriter};
use crate::chunk::Chunk;
use crate::code::{CodeSpec, KMode};
use crate::error::{Error, Result};

const MAGIC: [u8; 4] = *b"GDDP";
const VERSION: u8 = 0x01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Classic,
    Generalized,
}

/// Insertion-ordered set of bases with exact-value lookup.
#[derive(Debug, Clone, Default)]
pub struct Dictionary {
    entries: Vec<Chunk>,
    index: HashMap<Chunk, u64>,
}

impl Dictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> u64 {
        self.entries.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Chunk] {
        &self.entries
    }

    pub fn lookup(&self, base: &Chunk) -> Option<u64> {
        self.index.get(base).copied()
    }

    pub fn get(&self, index: u64) -> Option<&Chunk> {
        self.entries.get(index as usize)
    }

    /// Appends a new base, returning its insertion index. Duplicates are an
    /// error; they only arise from corrupt streams.
    pub fn insert(&mut self, base: Chunk) -> Result<u64> {
        if self.index.contains_key(&base) {
            return Err(Error::CorruptStream("duplicate base insertion"));
        }
        let ix = self.len();
        self.index.insert(base.clone(), ix);
        self.entries.push(base);
        Ok(ix)
    }

    /// Bits needed to point into the current dictionary.
    pub fn pointer_width(&self) -> u32 {
        ceil_log2(self.len())
    }
}

/// `ceil(log2 x)` with the `x <= 1 -> 0` convention used for pointers.
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// A fully encoded sequence: header fields plus the payload bits.
#[derive(Debug, Clone)]
pub struct EncodedStream {
    pub mode: Mode,
    pub spec: CodeSpec,
    pub chunk_count: u64,
    pub payload: BitBuffer,
}

/// Incremental encoder. Feeding chunks one at a time yields exactly the
/// same bits as a batch encode; the per-chunk return value is the coded
/// size of that chunk, so cumulative costs can be recorded mid-stream.
#[derive(Debug, Clone)]
pub struct StreamEncoder {
    mode: Mode,
    spec: CodeSpec,
    dict: Dictionary,
    writer: BitWriter,
    count: u64,
}

impl StreamEncoder {
    pub fn new(spec: CodeSpec, mode: Mode) -> Result<Self> {
        if mode == Mode::Classic && !spec.is_trivial() {
            return Err(Error::InvalidMode);
        }
        Ok(Self { mode, spec, dict: Dictionary::new(), writer: BitWriter::new(), count: 0 })
    }

    /// Classic deduplication over raw `n`-bit chunks.
    pub fn classic(n: usize) -> Result<Self> {
        Self::new(CodeSpec::trivial(n)?, Mode::Classic)
    }

    /// Generalized deduplication under the given code (which may be the
    /// trivial one).
    pub fn generalized(spec: CodeSpec) -> Self {
        Self::new(spec, Mode::Generalized).expect("generalized mode accepts any spec")
    }

    /// Encodes one chunk and returns the number of bits it cost.
    pub fn push(&mut self, chunk: &Chunk) -> Result<u64> {
        if chunk.len() != self.spec.n() {
            return Err(Error::LengthMismatch { expected: self.spec.n(), actual: chunk.len() });
        }
        let before = self.writer.len_bits();
        let pointer_width = self.dict.pointer_width();
        let inserted;
        match self.mode {
            Mode::Classic => match self.dict.lookup(chunk) {
                Some(ix) => {
                    inserted = false;
                    self.writer.write_bit(false);
                    self.writer.write_bits(ix, pointer_width)?;
                }
                None => {
                    inserted = true;
                    self.writer.write_bit(true);
                    chunk.write_to(&mut self.writer)?;
                    self.dict.insert(chunk.clone())?;
                }
            },
            Mode::Generalized => {
                let (base, deviation) = self.spec.map_to_base(chunk)?;
                match self.dict.lookup(&base) {
                    Some(ix) => {
                        inserted = false;
                        self.writer.write_bit(false);
                        self.writer.write_bits(ix, pointer_width)?;
                    }
                    None => {
                        inserted = true;
                        self.writer.write_bit(true);
                        match self.spec.k_mode() {
                            KMode::Full => base.write_to(&mut self.writer)?,
                            KMode::Compact => {
                                self.spec.compact_base(&base)?.write_to(&mut self.writer)?
                            }
                        }
                        self.dict.insert(base)?;
                    }
                }
                self.writer.write_bits(deviation, self.spec.q())?;
            }
        }
        self.count += 1;
        let cost = self.writer.len_bits() - before;
        // 1 flag + (k for a new base | pointer for a hit) + q deviation bits.
        debug_assert_eq!(
            cost,
            1 + if inserted { self.spec.k() as u64 } else { u64::from(pointer_width) }
                + u64::from(self.spec.q())
        );
        Ok(cost)
    }

    /// Bases inserted so far, in insertion order.
    pub fn dictionary(&self) -> &[Chunk] {
        self.dict.entries()
    }

    pub fn emitted_bits(&self) -> u64 {
        self.writer.len_bits()
    }

    pub fn chunk_count(&self) -> u64 {
        self.count
    }

    pub fn finish(self) -> EncodedStream {
        EncodedStream {
            mode: self.mode,
            spec: self.spec,
            chunk_count: self.count,
            payload: self.writer.finish(),
        }
    }
}

/// Batch encode: the incremental encoder folded over a chunk sequence.
pub fn encode(chunks: &[Chunk], spec: CodeSpec, mode: Mode) -> Result<EncodedStream> {
    let mut enc = StreamEncoder::new(spec, mode)?;
    for chunk in chunks {
        enc.push(chunk)?;
    }
    Ok(enc.finish())
}

/// Incremental decoder mirroring [`StreamEncoder`]'s dictionary evolution.
pub struct StreamDecoder<'a> {
    mode: Mode,
    spec: CodeSpec,
    dict: Dictionary,
    reader: BitReader<'a>,
    remaining: u64,
}

impl<'a> StreamDecoder<'a> {
    pub fn new(stream: &'a EncodedStream) -> Self {
        Self {
            mode: stream.mode,
            spec: stream.spec,
            dict: Dictionary::new(),
            reader: stream.payload.reader(),
            remaining: stream.chunk_count,
        }
    }

    pub fn dictionary(&self) -> &[Chunk] {
        self.dict.entries()
    }

    /// Decodes the next chunk, or `None` once `chunk_count` chunks are out.
    pub fn next_chunk(&mut self) -> Result<Option<Chunk>> {
        if self.remaining == 0 {
            return Ok(None);
        }
        self.remaining -= 1;
        let base = if self.reader.read_bit()? {
            let base = match (self.mode, self.spec.k_mode()) {
                (Mode::Classic, _) | (Mode::Generalized, KMode::Full) => {
                    let base = Chunk::read_from(&mut self.reader, self.spec.n())?;
                    if self.mode == Mode::Generalized && !self.spec.is_codeword(&base)? {
                        return Err(Error::CorruptStream("stored base is not a codeword"));
                    }
                    base
                }
                (Mode::Generalized, KMode::Compact) => {
                    let info = Chunk::read_from(&mut self.reader, self.spec.k())?;
                    self.spec.expand_base(&info)?
                }
            };
            self.dict.insert(base.clone())?;
            base
        } else {
            if self.dict.is_empty() {
                return Err(Error::CorruptStream("pointer flag with empty dictionary"));
            }
            let ix = self.reader.read_bits(self.dict.pointer_width())?;
            self.dict
                .get(ix)
                .cloned()
                .ok_or(Error::CorruptStream("pointer beyond dictionary"))?
        };
        match self.mode {
            Mode::Classic => Ok(Some(base)),
            Mode::Generalized => {
                let deviation = self.reader.read_bits(self.spec.q())?;
                Ok(Some(self.spec.apply_deviation(&base, deviation)?))
            }
        }
    }
}

/// Decodes a full stream back to its chunk sequence.
pub fn decode(stream: &EncodedStream) -> Result<Vec<Chunk>> {
    let mut dec = StreamDecoder::new(stream);
    let mut out = Vec::with_capacity(stream.chunk_count.min(1 << 20) as usize);
    while let Some(chunk) = dec.next_chunk()? {
        out.push(chunk);
    }
    // Anything left beyond byte padding means the header lied.
    if dec.reader.remaining() >= 8 {
        return Err(Error::CorruptStream("payload continues past the declared chunk count"));
    }
    Ok(out)
}

impl EncodedStream {
    /// Serializes to the container format: magic `GDDP`, version 0x01, mode
    /// byte (0 classic / 1 generalized), one byte `m` (0 means a trivial
    /// code, followed by the raw 16-bit chunk length), k-mode byte, 64-bit
    /// big-endian chunk count, then the payload zero-padded to bytes.
    pub fn to_container(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(18 + self.payload.as_bytes().len());
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.push(match self.mode {
            Mode::Classic => 0,
            Mode::Generalized => 1,
        });
        match self.spec.m() {
            Some(m) => out.push(m as u8),
            None => {
                out.push(0);
                out.extend_from_slice(&(self.spec.n() as u16).to_be_bytes());
            }
        }
        out.push(match self.spec.k_mode() {
            KMode::Full => 0,
            KMode::Compact => 1,
        });
        out.extend_from_slice(&self.chunk_count.to_be_bytes());
        out.extend_from_slice(self.payload.as_bytes());
        out
    }

    pub fn from_container(bytes: &[u8]) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidContainer(msg.to_string());
        let mut pos = 0usize;
        let mut take = |count: usize| -> Result<&[u8]> {
            let slice = bytes
                .get(pos..pos + count)
                .ok_or_else(|| bad("header truncated"))?;
            pos += count;
            Ok(slice)
        };
        if take(4)? != MAGIC {
            return Err(bad("bad magic"));
        }
        if take(1)? != [VERSION] {
            return Err(bad("unsupported version"));
        }
        let mode = match take(1)?[0] {
            0 => Mode::Classic,
            1 => Mode::Generalized,
            other => return Err(Error::InvalidContainer(format!("unknown mode byte {other}"))),
        };
        let m = take(1)?[0];
        let n = if m == 0 {
            let raw = take(2)?;
            u16::from_be_bytes([raw[0], raw[1]]) as usize
        } else {
            0
        };
        let k_mode = match take(1)?[0] {
            0 => KMode::Full,
            1 => KMode::Compact,
            other => return Err(Error::InvalidContainer(format!("unknown k-mode byte {other}"))),
        };
        let spec = if m == 0 {
            if k_mode == KMode::Compact {
                return Err(bad("trivial code cannot use compact bases"));
            }
            CodeSpec::trivial(n).map_err(|_| bad("invalid chunk length"))?
        } else {
            if mode == Mode::Classic {
                return Err(bad("classic mode requires the trivial code"));
            }
            CodeSpec::hamming(u32::from(m), k_mode)
                .map_err(|_| Error::InvalidContainer(format!("unsupported m={m}")))?
        };
        let raw = take(8)?;
        let chunk_count = u64::from_be_bytes(raw.try_into().expect("8-byte slice"));
        let payload_bytes = bytes[pos..].to_vec();
        let len_bits = payload_bytes.len() as u64 * 8;
        Ok(Self { mode, spec, chunk_count, payload: BitBuffer::from_bytes(payload_bytes, len_bits)? })
    }
}
