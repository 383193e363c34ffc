//! Compression-ratio measurement and the block-code compressor for
//! non-normal sequences.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::alphabet::{word_key, Sym};
use crate::error::{Error, Result};
use crate::occurrences::block_entropy;
use crate::shift::ShiftSpec;
use crate::transducer::{compose, min_output_lengths, ratio_f64, Runner, Transducer};

use super::chain::{BlockMap, EmpiricalChain};
use super::code::BlockCode;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioSample {
    pub prefix_length: usize,
    pub output_length: u64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompressionReport {
    pub input_length: usize,
    pub samples: Vec<RatioSample>,
    pub final_ratio: f64,
    /// Number of trailing samples the estimates below range over.
    pub window: usize,
    pub liminf_estimate: f64,
    pub limsup_estimate: f64,
    /// Trailing input symbols not covered by a whole block.
    pub dropped_symbols: usize,
    pub targets: BTreeMap<String, f64>,
}

/// `|C(x[1..n])|/n` at `samples` evenly spaced prefix lengths, in one
/// pass over `x`. The window is the trailing tenth of the samples.
pub fn compression_ratio(c: &Transducer, x: &[Sym], samples: usize) -> Result<CompressionReport> {
    if x.is_empty() {
        return Err(Error::InvalidArgument("cannot measure the ratio of an empty input".into()));
    }
    let s = samples.clamp(1, x.len());
    let mut points = (1..=s).map(|i| (i * x.len()).div_ceil(s)).peekable();
    let mut r = Runner::new(c);
    let mut out = Vec::with_capacity(s);
    for (i, &a) in x.iter().enumerate() {
        r.step(a)?;
        if points.peek() == Some(&(i + 1)) {
            points.next();
            let len = r.output_len()?;
            out.push(RatioSample { prefix_length: i + 1, output_length: len, ratio: len as f64 / (i + 1) as f64 });
        }
    }
    let window = s.div_ceil(10);
    let tail = &out[out.len() - window..];
    Ok(CompressionReport {
        input_length: x.len(),
        final_ratio: out.last().expect("at least one sample").ratio,
        window,
        liminf_estimate: tail.iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min),
        limsup_estimate: tail.iter().map(|p| p.ratio).fold(f64::NEG_INFINITY, f64::max),
        samples: out,
        dropped_symbols: 0,
        targets: BTreeMap::new(),
    })
}

/// `h(μ_{π̂,P̂}) − h(Y)`; negative values leave room for compression.
pub fn entropy_gap_certificate(chain: &EmpiricalChain, y_entropy: f64) -> f64 {
    chain.entropy() - y_entropy
}

/// The composed compressor `C' = C ∘ f` from `X` to `{0,1}` with its parts.
#[derive(Clone, Debug)]
pub struct NonnormalCompression {
    pub block_map: BlockMap,
    pub chain: EmpiricalChain,
    pub code: BlockCode,
    pub transducer: Transducer,
    pub report: CompressionReport,
}

impl NonnormalCompression {
    /// Block-encodes then codes `x` directly, without the transducer.
    pub fn encode(&self, x: &[Sym]) -> Result<Vec<Sym>> {
        let (y, _) = self.block_map.encode(x)?;
        Ok(self.code.encode(&y)?.0)
    }

    pub fn decode(&self, bits: &[Sym]) -> Result<Vec<Sym>> {
        self.block_map.decode(&self.code.decode(bits)?)
    }

    /// Input symbols consumed per code block, `ℓk`.
    pub fn block_length(&self) -> usize {
        self.block_map.block_length() * self.code.block_length()
    }
}

/// Encodes `x` by `ℓ`-blocks, fits the empirical chain of the block
/// sequence, builds the `k`-block code and composes it with `f`. The
/// ratio is measured by running the composed machine on `x`.
pub fn compress_nonnormal(spec: &ShiftSpec, x: &[Sym], l: usize, k: usize, samples: usize) -> Result<NonnormalCompression> {
    if l == 0 {
        return Err(Error::InvalidArgument("block length l must be at least 1".into()));
    }
    if let Some(i) = spec.first_violation(x) {
        return Err(Error::InvalidArgument(format!("sequence is not a block of the shift (forbidden pair at position {i})")));
    }
    let block_map = BlockMap::new(spec, l)?;
    let (y, _) = block_map.encode(x)?;
    let chain = EmpiricalChain::from_sequence(&y, block_map.size())?;
    let code = BlockCode::build(&chain, k)?;
    let kraft = code.to_transducer(block_map.alphabet())?;
    let transducer = if l == 1 { kraft } else { compose(&kraft, &block_map.to_transducer()?)? };
    let mut report = compression_ratio(&transducer, x, samples)?;
    report.dropped_symbols = x.len() % (l * k);
    let h = spec.topological_entropy()?;
    let y_entropy = l as f64 * h;
    report.targets.insert("h_X".into(), h);
    report.targets.insert("h_Y".into(), y_entropy);
    report.targets.insert("chain_entropy".into(), chain.entropy());
    report.targets.insert("entropy_gap".into(), entropy_gap_certificate(&chain, y_entropy));
    Ok(NonnormalCompression { block_map, chain, code, transducer, report })
}

/// Both sides of the block-entropy lower bound on a prefix `u = x[1..kℓ]`:
/// `ρ(u) ≥ (1/ℓ)Σ P(w,u)L(w)` and
/// `h_ℓ(u) − (1/ℓ)Σ P(w,u)L(w) ≤ (1/ℓ)log2 Σ 2^{−L(w)} ≤ (1/ℓ)log2(K|Q|²(1+ℓr_C))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockEntropyBound {
    pub block_length: usize,
    pub prefix_length: usize,
    pub k: u64,
    pub block_entropy: f64,
    /// `|C(u)|/|u|` along the resolved run.
    pub ratio: f64,
    /// `(1/ℓ)Σ P(w,u)L(w)`.
    pub min_output_rate: f64,
    /// `(1/ℓ)log2 Σ 2^{−L(w)}`.
    pub jensen_bound: f64,
    /// `(1/ℓ)log2(K|Q|²(1+ℓr_C))`.
    pub kraft_bound: f64,
    pub holds: bool,
}

const SLACK: f64 = 1e-9;

/// Evaluates [`BlockEntropyBound`] for `u`; `|u|` must be a multiple of `ℓ`.
pub fn check_block_entropy_bound(c: &Transducer, u: &[Sym], l: usize, k: u64) -> Result<BlockEntropyBound> {
    if c.output_alphabet().len() != 2 {
        return Err(Error::AlphabetMismatch("the bound is stated for binary outputs".into()));
    }
    let h = block_entropy(u, l)?;
    let radix = c.input_alphabet().len();
    c.input_alphabet().check_word(u)?;
    let lengths = min_output_lengths(c, l)?;

    let blocks = (u.len() / l) as f64;
    let mut weighted = 0u64;
    for w in u.chunks_exact(l) {
        weighted += lengths[word_key(w, radix) as usize].ok_or(Error::NoRun)?;
    }
    let min_output_rate = weighted as f64 / blocks / l as f64;

    let top = lengths.iter().flatten().copied().max().unwrap_or(0);
    let sum = lengths.iter().flatten().fold(BigUint::zero(), |acc, &v| acc + (BigUint::one() << (top - v) as usize));
    let jensen_bound = (ratio_f64(&sum, top)).log2() / l as f64;
    let rhs = (k as f64) * (c.num_states() as f64).powi(2) * (1.0 + (l * c.max_output_length()) as f64);
    let kraft_bound = rhs.log2() / l as f64;

    let mut r = Runner::new(c);
    r.feed(u)?;
    let ratio = r.output_len()? as f64 / u.len() as f64;

    let holds = ratio + SLACK >= min_output_rate
        && h - min_output_rate <= jensen_bound + SLACK
        && jensen_bound <= kraft_bound + SLACK;
    Ok(BlockEntropyBound {
        block_length: l,
        prefix_length: u.len(),
        k,
        block_entropy: h,
        ratio,
        min_output_rate,
        jensen_bound,
        kraft_bound,
        holds,
    })
}
