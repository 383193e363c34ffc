//! Block recoding of one shift of finite type into another.
//!
//! Blocks of length `qn+1` of `X` are mapped injectively to words `a·w`
//! where `awa` is a block of `Y`, so consecutive images glue into a block of
//! `Y`. The map pairs the `i`-th block of `X` in lexicographic order with
//! the `i`-th admissible `w` in lexicographic order; both sides are ranked
//! by path counting, so nothing is enumerated unless a transducer is
//! requested explicitly.

use serde::{Deserialize, Serialize};

use crate::alphabet::Sym;
use crate::error::{Error, Result};
use crate::shift::ShiftSpec;
use crate::transducer::{Transducer, Transition};

/// Largest denominator tried for `p/q`.
const MAX_Q: u64 = 10_000;
/// Largest block multiplier tried for `n`.
const MAX_N: u64 = 4096;

#[derive(Clone, Debug)]
pub struct Recoder {
    source: ShiftSpec,
    target: ShiftSpec,
    params: RecoderParams,
    /// `src[r][b]`: blocks of `X` of length `r` starting with `b`.
    src: Vec<Vec<u128>>,
    /// `dst[r][b]`: words `v` of length `r` starting with `b`, valid in `Y`,
    /// whose last symbol may be followed by the anchor.
    dst: Vec<Vec<u128>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoderParams {
    pub h_source: f64,
    pub h_target: f64,
    pub epsilon: f64,
    pub p: u64,
    pub q: u64,
    pub n: u64,
    /// Anchor symbol of `Y`, by index.
    pub anchor: Sym,
    /// `qn + 1`.
    pub input_block: usize,
    /// `pn`, anchor included.
    pub output_block: usize,
    /// `|B_{qn+1}(X)|`.
    pub source_blocks: u128,
    /// `N^{pn}_{aa}` for the anchor.
    pub capacity: u128,
}

impl RecoderParams {
    /// `pn / (qn+1)`: output symbols per input symbol on whole blocks.
    pub fn rate(&self) -> f64 {
        self.output_block as f64 / self.input_block as f64
    }
}

/// The smallest `q`, then smallest `p`, with `r < p/q < r + ε`.
pub fn choose_ratio(r: f64, epsilon: f64) -> Result<(u64, u64)> {
    if !(epsilon > 0.0) || !r.is_finite() || r < 0.0 {
        return Err(Error::InvalidArgument(format!("need ε > 0 and a finite entropy ratio, got ε = {epsilon}, ratio = {r}")));
    }
    for q in 1..=MAX_Q {
        let p = (r * q as f64).floor() as u64 + 1;
        if (p as f64) < (r + epsilon) * q as f64 && p as f64 > r * q as f64 {
            return Ok((p, q));
        }
    }
    Err(Error::RecoderSearch(format!("no p/q with q ≤ {MAX_Q} in the ε-window")))
}

impl Recoder {
    pub fn build(source: &ShiftSpec, target: &ShiftSpec, epsilon: f64) -> Result<Self> {
        for s in [source, target] {
            if !s.is_aperiodic()? {
                return Err(Error::NotAperiodic);
            }
        }
        let h_source = source.topological_entropy()?;
        let h_target = target.topological_entropy()?;
        if !(h_target > 0.0) {
            return Err(Error::InvalidArgument("target shift has zero entropy".into()));
        }
        let (p, q) = choose_ratio(h_source / h_target, epsilon)?;
        let overflow = |what: &str| Error::RecoderSearch(format!("{what} overflows before the counting inequality holds; try a larger ε"));
        for n in 1..=MAX_N {
            let input_block = (q * n + 1) as usize;
            let output_block = (p * n) as usize;
            let source_blocks = source.block_count(input_block).map_err(|_| overflow("|B_{qn+1}(X)|"))?;
            let returns = target.matrix_power(output_block as u32).map_err(|_| overflow("N^{pn}"))?;
            // anchor: largest return count, earliest symbol on ties
            let (anchor, capacity) = (0..target.size())
                .map(|a| (a as Sym, returns[a][a]))
                .fold((0, 0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if source_blocks <= capacity {
                let params = RecoderParams {
                    h_source,
                    h_target,
                    epsilon,
                    p,
                    q,
                    n,
                    anchor,
                    input_block,
                    output_block,
                    source_blocks,
                    capacity,
                };
                log::info!("recoder p/q = {p}/{q}, n = {n}, blocks {input_block} -> {output_block}");
                return Ok(Self::with_params(source.clone(), target.clone(), params));
            }
        }
        Err(Error::RecoderSearch(format!("no n ≤ {MAX_N} satisfies the counting inequality")))
    }

    fn with_params(source: ShiftSpec, target: ShiftSpec, params: RecoderParams) -> Self {
        let m = params.input_block;
        let ks = source.size();
        let mut src = vec![vec![0u128; ks]; m + 1];
        src[1] = vec![1; ks];
        for r in 2..=m {
            for b in 0..ks {
                src[r][b] = (0..ks).filter(|&c| source.allowed(b as Sym, c as Sym)).map(|c| src[r - 1][c]).sum();
            }
        }
        let l = params.output_block - 1;
        let kt = target.size();
        let a = params.anchor;
        let mut dst = vec![vec![0u128; kt]; l.max(1) + 1];
        for b in 0..kt {
            dst[1][b] = target.allowed(b as Sym, a) as u128;
        }
        for r in 2..=l {
            for b in 0..kt {
                dst[r][b] = (0..kt).filter(|&c| target.allowed(b as Sym, c as Sym)).map(|c| dst[r - 1][c]).sum();
            }
        }
        Self { source, target, params, src, dst }
    }

    pub fn params(&self) -> &RecoderParams {
        &self.params
    }

    pub fn source(&self) -> &ShiftSpec {
        &self.source
    }

    pub fn target(&self) -> &ShiftSpec {
        &self.target
    }

    /// Lexicographic rank of a block of `X` of length `qn+1`.
    pub fn rank_source(&self, u: &[Sym]) -> Result<u128> {
        let m = self.params.input_block;
        if u.len() != m || !self.source.is_block(u)? {
            return Err(Error::InvalidArgument(format!("not a block of X of length {m}")));
        }
        let mut rank = 0u128;
        for i in 0..m {
            for b in 0..u[i] {
                if i == 0 || self.source.allowed(u[i - 1], b) {
                    rank += self.src[m - i][b as usize];
                }
            }
        }
        Ok(rank)
    }

    pub fn unrank_source(&self, mut rank: u128) -> Result<Vec<Sym>> {
        let m = self.params.input_block;
        if rank >= self.params.source_blocks {
            return Err(Error::Decode(format!("rank {rank} exceeds the {} source blocks", self.params.source_blocks)));
        }
        let mut u = Vec::with_capacity(m);
        for i in 0..m {
            for b in 0..self.source.size() as Sym {
                if i > 0 && !self.source.allowed(u[i - 1], b) {
                    continue;
                }
                let c = self.src[m - i][b as usize];
                if rank < c {
                    u.push(b);
                    break;
                }
                rank -= c;
            }
        }
        Ok(u)
    }

    /// The `rank`-th word `w` (lexicographically) with `a·w·a` a block of `Y`.
    pub fn unrank_target(&self, mut rank: u128) -> Result<Vec<Sym>> {
        if rank >= self.params.capacity {
            return Err(Error::InvalidArgument(format!("rank {rank} exceeds capacity {}", self.params.capacity)));
        }
        let l = self.params.output_block - 1;
        let mut w = Vec::with_capacity(l);
        let mut prev = self.params.anchor;
        for pos in 0..l {
            for b in 0..self.target.size() as Sym {
                if !self.target.allowed(prev, b) {
                    continue;
                }
                let c = self.dst[l - pos][b as usize];
                if rank < c {
                    w.push(b);
                    prev = b;
                    break;
                }
                rank -= c;
            }
        }
        Ok(w)
    }

    pub fn rank_target(&self, w: &[Sym]) -> Result<u128> {
        let l = self.params.output_block - 1;
        let a = self.params.anchor;
        let mut full = Vec::with_capacity(l + 2);
        full.push(a);
        full.extend_from_slice(w);
        full.push(a);
        if w.len() != l || !self.target.is_block(&full)? {
            return Err(Error::Decode("output block is not a·w·a with awa a block of Y".into()));
        }
        let mut rank = 0u128;
        let mut prev = a;
        for (pos, &s) in w.iter().enumerate() {
            for b in 0..s {
                if self.target.allowed(prev, b) {
                    rank += self.dst[l - pos][b as usize];
                }
            }
            prev = s;
        }
        Ok(rank)
    }

    /// `a·f(u)` for one source block.
    pub fn encode_block(&self, u: &[Sym]) -> Result<Vec<Sym>> {
        let mut out = Vec::with_capacity(self.params.output_block);
        out.push(self.params.anchor);
        out.extend(self.unrank_target(self.rank_source(u)?)?);
        Ok(out)
    }

    /// Encodes every whole block of `x`; the trailing remainder is dropped.
    pub fn encode(&self, x: &[Sym]) -> Result<Recoded> {
        if let Some(i) = self.source.first_violation(x) {
            return Err(Error::InvalidArgument(format!("input is not a block of X (forbidden pair at position {i})")));
        }
        let m = self.params.input_block;
        let mut output = Vec::with_capacity(x.len() / m * self.params.output_block);
        for u in x.chunks_exact(m) {
            output.extend(self.encode_block(u)?);
        }
        Ok(Recoded { output, blocks: x.len() / m, dropped: x.len() % m })
    }

    pub fn decode(&self, y: &[Sym]) -> Result<Vec<Sym>> {
        let k = self.params.output_block;
        if y.len() % k != 0 {
            return Err(Error::Decode(format!("length {} is not a multiple of {k}", y.len())));
        }
        let mut x = Vec::with_capacity(y.len() / k * self.params.input_block);
        for chunk in y.chunks_exact(k) {
            if chunk[0] != self.params.anchor {
                return Err(Error::Decode("output block does not start with the anchor".into()));
            }
            let r = self.rank_target(&chunk[1..])?;
            x.extend(self.unrank_source(r)?);
        }
        Ok(x)
    }

    /// The recoder as a trie transducer: it reads a block, then writes its
    /// image on the block's last symbol. Fails if `|B_{qn+1}(X)|` exceeds `cap`.
    pub fn to_transducer(&self, cap: u128) -> Result<Transducer> {
        let m = self.params.input_block;
        if self.params.source_blocks > cap {
            return Err(Error::CapExceeded { requested: self.params.source_blocks, cap });
        }
        let mut b = TrieBuilder::new(self.source.alphabet().len());
        let mut u = Vec::with_capacity(m);
        let mut next_rank = 0u128;
        let mut err = None;
        self.source_dfs(&mut u, 0, &mut b, &mut next_rank, &mut err);
        if let Some(e) = err {
            return Err(e);
        }
        b.finish(self.source.alphabet(), self.target.alphabet())
    }

    fn source_dfs(&self, u: &mut Vec<Sym>, node: usize, b: &mut TrieBuilder, next_rank: &mut u128, err: &mut Option<Error>) {
        let m = self.params.input_block;
        for s in 0..self.source.size() as Sym {
            if err.is_some() {
                return;
            }
            if let Some(&last) = u.last() {
                if !self.source.allowed(last, s) {
                    continue;
                }
            }
            u.push(s);
            if u.len() == m {
                let mut out = vec![self.params.anchor];
                match self.unrank_target(*next_rank) {
                    Ok(w) => out.extend(w),
                    Err(e) => *err = Some(e),
                }
                *next_rank += 1;
                b.close(node, s, out);
            } else {
                let child = b.child(node, s, u);
                self.source_dfs(u, child, b, next_rank, err);
            }
            u.pop();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recoded {
    pub output: Vec<Sym>,
    pub blocks: usize,
    /// Trailing input symbols not forming a whole block.
    pub dropped: usize,
}

/// Incremental builder for prefix-tree block transducers: node 0 is the
/// root, the only initial and final state.
pub(crate) struct TrieBuilder {
    names: Vec<String>,
    transitions: Vec<Transition>,
    radix: usize,
}

impl TrieBuilder {
    pub(crate) fn new(radix: usize) -> Self {
        Self { names: vec!["^".into()], transitions: Vec::new(), radix }
    }

    /// A new internal node reached from `node` on `s`; `prefix` names it.
    pub(crate) fn child(&mut self, node: usize, s: Sym, prefix: &[Sym]) -> usize {
        let id = self.names.len();
        let name = prefix.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(".");
        self.names.push(format!("^{name}"));
        self.transitions.push(Transition { from: node, input: s, output: Vec::new(), to: id });
        id
    }

    /// Completes a block: back to the root writing `output`.
    pub(crate) fn close(&mut self, node: usize, s: Sym, output: Vec<Sym>) {
        self.transitions.push(Transition { from: node, input: s, output, to: 0 });
    }

    pub(crate) fn finish(self, input: &crate::alphabet::Alphabet, output: &crate::alphabet::Alphabet) -> Result<Transducer> {
        debug_assert_eq!(self.radix, input.len());
        Transducer::new(self.names, input.clone(), output.clone(), self.transitions, &[0], &[0])
    }
}
