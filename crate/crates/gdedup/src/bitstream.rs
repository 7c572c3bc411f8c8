//! Bit-exact variable-width reading and writing, MSB first.
//!
//! The first bit appended to a [`BitWriter`] ends up in the most significant
//! bit of the first serialized byte; a stream of `L` bits serializes to
//! `ceil(L / 8)` bytes with zero padding in the trailing byte's least
//! significant bits. Reads past the end of a [`BitReader`] are errors, never
//! silent zeros.

use crate::error::{Error, Result};

/// Append-only bit sink. Bits are buffered in a 64-bit accumulator and
/// flushed to bytes as they fill.
#[derive(Debug, Clone, Default)]
pub struct BitWriter {
    bytes: Vec<u8>,
    acc: u64,
    acc_bits: u32,
    len_bits: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Total bits appended since creation.
    pub fn len_bits(&self) -> u64 {
        self.len_bits
    }

    /// Appends the `width` low bits of `value`, most significant first.
    /// `width == 0` appends nothing (and requires `value == 0`).
    pub fn write_bits(&mut self, value: u64, width: u32) -> Result<()> {
        if width > 64 {
            return Err(Error::WidthTooLarge(width));
        }
        if width < 64 && value >> width != 0 {
            return Err(Error::ValueOverflow { value, width });
        }
        let mut remaining = width;
        while remaining > 0 {
            let take = remaining.min(64 - self.acc_bits);
            let piece = if take == 64 {
                value
            } else {
                (value >> (remaining - take)) & ((1u64 << take) - 1)
            };
            self.acc = if take == 64 { piece } else { (self.acc << take) | piece };
            self.acc_bits += take;
            remaining -= take;
            while self.acc_bits >= 8 {
                self.bytes.push((self.acc >> (self.acc_bits - 8)) as u8);
                self.acc_bits -= 8;
            }
        }
        self.len_bits += u64::from(width);
        Ok(())
    }

    pub fn write_bit(&mut self, bit: bool) {
        self.write_bits(u64::from(bit), 1).expect("1-bit write cannot overflow");
    }

    /// Serializes the current contents without consuming the writer:
    /// `ceil(len/8)` bytes, trailing byte zero-padded in its low bits.
    pub fn to_padded_bytes(&self) -> Vec<u8> {
        let mut out = self.bytes.clone();
        if self.acc_bits > 0 {
            let mask = (1u64 << self.acc_bits) - 1;
            out.push(((self.acc & mask) << (8 - self.acc_bits)) as u8);
        }
        out
    }

    pub fn finish(self) -> BitBuffer {
        let bytes = self.to_padded_bytes();
        BitBuffer { bytes, len_bits: self.len_bits }
    }
}

/// An immutable bit sequence with an exact bit length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitBuffer {
    bytes: Vec<u8>,
    len_bits: u64,
}

impl BitBuffer {
    /// Wraps raw bytes as a bit sequence of `len_bits` bits.
    pub fn from_bytes(bytes: Vec<u8>, len_bits: u64) -> Result<Self> {
        if len_bits > bytes.len() as u64 * 8 {
            return Err(Error::TruncatedStream {
                needed: len_bits - bytes.len() as u64 * 8,
                available: 0,
            });
        }
        Ok(Self { bytes, len_bits })
    }

    pub fn len_bits(&self) -> u64 {
        self.len_bits
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader { bytes: &self.bytes, len_bits: self.len_bits, pos: 0 }
    }

    /// The bits as an ASCII string of '0'/'1', in stream order.
    pub fn to_bit_string(&self) -> String {
        (0..self.len_bits)
            .map(|i| {
                let byte = self.bytes[(i / 8) as usize];
                if byte >> (7 - (i % 8)) & 1 == 1 { '1' } else { '0' }
            })
            .collect()
    }
}

/// Cursor over a bit sequence. The cursor never passes the end.
#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    len_bits: u64,
    pos: u64,
}

impl<'a> BitReader<'a> {
    /// Reads all of `bytes` as a stream of `bytes.len() * 8` bits.
    pub fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, len_bits: bytes.len() as u64 * 8, pos: 0 }
    }

    pub fn position(&self) -> u64 {
        self.pos
    }

    pub fn remaining(&self) -> u64 {
        self.len_bits - self.pos
    }

    /// Reads `width` bits MSB first and returns them as an integer.
    /// `width == 0` returns 0 without moving the cursor.
    pub fn read_bits(&mut self, width: u32) -> Result<u64> {
        if width > 64 {
            return Err(Error::WidthTooLarge(width));
        }
        if u64::from(width) > self.remaining() {
            return Err(Error::TruncatedStream {
                needed: u64::from(width),
                available: self.remaining(),
            });
        }
        let mut out = 0u64;
        let mut remaining = width;
        while remaining > 0 {
            let byte = self.bytes[(self.pos / 8) as usize];
            let offset = (self.pos % 8) as u32;
            let avail = 8 - offset;
            let take = avail.min(remaining);
            let piece = u64::from(byte >> (avail - take)) & ((1u64 << take) - 1);
            out = (out << take) | piece;
            self.pos += u64::from(take);
            remaining -= take;
        }
        Ok(out)
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        Ok(self.read_bits(1)? == 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_one(value: u64, width: u32) -> BitBuffer {
        let mut w = BitWriter::new();
        w.write_bits(value, width).unwrap();
        w.finish()
    }

    #[test]
    fn writes_msb_first() {
        assert_eq!(write_one(5, 3).to_bit_string(), "101");
        assert_eq!(write_one(1, 2).to_bit_string(), "01");
    }

    #[test]
    fn zero_width_appends_nothing() {
        let buf = write_one(0, 0);
        assert_eq!(buf.len_bits(), 0);
        assert!(buf.as_bytes().is_empty());
        let mut r = buf.reader();
        assert_eq!(r.read_bits(0).unwrap(), 0);
        assert_eq!(r.position(), 0);
    }

    #[test]
    fn rejects_oversized_values() {
        let mut w = BitWriter::new();
        assert!(matches!(w.write_bits(4, 2), Err(Error::ValueOverflow { .. })));
        assert!(matches!(w.write_bits(1, 0), Err(Error::ValueOverflow { .. })));
        assert!(matches!(w.write_bits(0, 65), Err(Error::WidthTooLarge(65))));
        assert_eq!(w.len_bits(), 0);
    }

    #[test]
    fn read_past_end_is_an_error() {
        let buf = write_one(5, 3);
        let mut r = buf.reader();
        assert_eq!(r.read_bits(3).unwrap(), 5);
        assert!(matches!(r.read_bits(1), Err(Error::TruncatedStream { .. })));
    }

    #[test]
    fn round_trip_exhaustive_small_widths() {
        for width in 0..=12u32 {
            for value in 0..(1u64 << width) {
                let buf = write_one(value, width);
                assert_eq!(buf.len_bits(), u64::from(width));
                let mut r = buf.reader();
                assert_eq!(r.read_bits(width).unwrap(), value, "width {width} value {value}");
                assert_eq!(r.position(), u64::from(width));
            }
        }
    }

    #[test]
    fn sixty_four_bit_values_round_trip() {
        for value in [u64::MAX, u64::MAX - 1, 1u64 << 63, 0x0123_4567_89AB_CDEF] {
            let buf = write_one(value, 64);
            assert_eq!(buf.reader().read_bits(64).unwrap(), value);
        }
    }

    #[test]
    fn serializes_with_zero_padding() {
        let mut w = BitWriter::new();
        w.write_bits(0b1_0110, 5).unwrap();
        let buf = w.finish();
        assert_eq!(buf.as_bytes(), &[0b1011_0000]);
        let mut w = BitWriter::new();
        w.write_bits(0xABCD, 16).unwrap();
        w.write_bit(true);
        assert_eq!(w.to_padded_bytes(), vec![0xAB, 0xCD, 0x80]);
        assert_eq!(w.len_bits(), 17);
    }

    #[test]
    fn concatenated_fields_read_back_in_order() {
        let mut w = BitWriter::new();
        w.write_bits(0b101, 3).unwrap();
        w.write_bits(0, 0).unwrap();
        w.write_bits(0xFFFF_FFFF_FFFF_FFFF, 64).unwrap();
        w.write_bits(2, 7).unwrap();
        let buf = w.finish();
        assert_eq!(buf.len_bits(), 74);
        let mut r = buf.reader();
        assert_eq!(r.read_bits(3).unwrap(), 0b101);
        assert_eq!(r.read_bits(64).unwrap(), u64::MAX);
        assert_eq!(r.read_bits(7).unwrap(), 2);
        assert_eq!(r.remaining(), 0);
    }
}
