//! Generalized deduplication: a lossless dictionary coder that deduplicates
//! *near*-identical fixed-size chunks, not just exact copies.
//!
//! Every chunk is split into a **base** (the nearest codeword of a binary
//! Hamming code) and a **deviation** (the single bit, if any, by which the
//! chunk differs from its base). Bases are deduplicated through an
//! insertion-ordered dictionary; deviations ride along in a fixed number of
//! bits. Classic whole-chunk deduplication falls out as the special case of
//! the trivial code, where each chunk is its own base and there is no
//! deviation.
//!
//! The crate bundles:
//!
//! * [`codec`]: the streaming encoder/decoder and its file container,
//! * [`code`]: Hamming code machinery (syndrome decoding, base compaction),
//! * [`source`]: a synthetic chunk source with known entropy,
//! * [`analysis`]: closed-form bounds on expected coded length, asymptotic
//!   per-chunk cost, and convergence rates,
//! * [`harness`]: a seeded Monte Carlo engine that measures both codecs
//!   against the analytical bounds and a DEFLATE baseline, exporting CSV
//!   tables and SVG charts.

pub mod analysis;
pub mod bitstream;
pub mod chunk;
pub mod code;
pub mod codec;
mod error;
pub mod harness;
pub mod rng;
pub mod source;

pub use chunk::Chunk;
pub use code::{CodeSpec, KMode};
pub use codec::Mode;
pub use error::{Error, Result};
