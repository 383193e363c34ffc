//! Finite-state compressors: the cross-shift block recoder, the block code
//! built from an empirical Markov chain, and compression-ratio measurement.

mod bitstream;
mod chain;
mod code;
mod pipeline;
mod recoder;

pub use bitstream::{read_bits, write_bits};
pub use chain::{BlockMap, EmpiricalChain, Fraction};
pub use code::{BlockCode, CodeSummary};
pub use pipeline::{
    check_block_entropy_bound, compress_nonnormal, compression_ratio, entropy_gap_certificate, BlockEntropyBound,
    CompressionReport, NonnormalCompression, RatioSample,
};
pub use recoder::{choose_ratio, Recoded, Recoder, RecoderParams};
