use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("value {value} does not fit in {width} bits")]
    ValueOverflow { value: u64, width: u32 },
    #[error("bit width {0} exceeds 64")]
    WidthTooLarge(u32),
    #[error("bitstream exhausted: needed {needed} more bits, {available} remain")]
    TruncatedStream { needed: u64, available: u64 },
    #[error("chunk has {actual} bits, expected {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("deviation index {index} out of range (max {max})")]
    DeviationOutOfRange { index: u64, max: u64 },
    #[error("base is not a codeword")]
    NotACodeword,
    #[error("unsupported parity bit count m={0}, supported range is 2..=16")]
    UnsupportedParity(u32),
    #[error("chunk length {0} out of range (1..=65535)")]
    InvalidChunkLength(usize),
    #[error("operation requires a Hamming code, not the trivial code")]
    RequiresHamming,
    #[error("requested {requested} active bases but only {available} codewords exist")]
    TooManyBases { requested: u64, available: u128 },
    #[error("active bases must be distinct codewords of the chunk length")]
    InvalidBases,
    #[error("source has {0} chunks, too many to enumerate (limit 2^20)")]
    SourceTooLarge(u128),
    #[error("corrupt stream: {0}")]
    CorruptStream(&'static str),
    #[error("invalid container: {0}")]
    InvalidContainer(String),
    #[error("classic mode requires the trivial code")]
    InvalidMode,
    #[error("input of {bits} bits is not a multiple of the chunk length {n}")]
    UnalignedInput { bits: u64, n: usize },
    #[error("bound evaluation is limited to C <= 10^7, got {0}")]
    ChunkCountTooLarge(u64),
    #[error("invalid parameters: {0}")]
    InvalidParams(&'static str),
    #[error("baseline compressor failed: {0}")]
    Baseline(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
