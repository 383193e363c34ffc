//! Block relabeling `f: B_ℓ(X) → B` and the empirical Markov chain of a
//! sequence over `B`.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Sym};
use crate::error::{Error, Result};
use crate::measure::{markov_entropy, Measure};
use crate::shift::{BlockSet, ShiftSpec, DEFAULT_ENUMERATION_CAP};
use crate::transducer::Transducer;

use super::recoder::TrieBuilder;

/// Lexicographic bijection between the length-`ℓ` blocks of a shift and
/// the symbols of a block alphabet `B`.
#[derive(Clone, Debug)]
pub struct BlockMap {
    spec: ShiftSpec,
    blocks: BlockSet,
    alphabet: Alphabet,
}

impl BlockMap {
    /// For `ℓ = 1` the block alphabet reuses the shift's glyphs, so `f` is the identity.
    pub fn new(spec: &ShiftSpec, l: usize) -> Result<Self> {
        let blocks = spec.blocks_capped(l, DEFAULT_ENUMERATION_CAP)?;
        let alphabet = if l == 1 { spec.alphabet().clone() } else { Alphabet::generated(blocks.len()) };
        Ok(Self { spec: spec.clone(), blocks, alphabet })
    }

    pub fn block_length(&self) -> usize {
        self.blocks.length
    }

    /// `M = |B_ℓ(X)|`.
    pub fn size(&self) -> usize {
        self.blocks.len()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn spec(&self) -> &ShiftSpec {
        &self.spec
    }

    pub fn block(&self, b: Sym) -> &[Sym] {
        &self.blocks.words[b as usize]
    }

    pub fn symbol(&self, u: &[Sym]) -> Result<Sym> {
        self.blocks
            .index_of(u)
            .map(|i| i as Sym)
            .ok_or_else(|| Error::InvalidArgument(format!("{} is not a block of the shift", self.spec.alphabet().render(u))))
    }

    /// `y`: the aligned `ℓ`-blocks of `x` relabeled, and the number of
    /// trailing symbols dropped.
    pub fn encode(&self, x: &[Sym]) -> Result<(Vec<Sym>, usize)> {
        let l = self.block_length();
        let y = x.chunks_exact(l).map(|u| self.symbol(u)).collect::<Result<Vec<_>>>()?;
        Ok((y, x.len() % l))
    }

    pub fn decode(&self, y: &[Sym]) -> Result<Vec<Sym>> {
        self.alphabet.check_word(y)?;
        Ok(y.iter().flat_map(|&b| self.block(b).iter().copied()).collect())
    }

    /// `f` as a trie transducer from `X` to `B`.
    pub fn to_transducer(&self) -> Result<Transducer> {
        let mut b = TrieBuilder::new(self.spec.size());
        let mut nodes: Vec<(Vec<Sym>, usize)> = vec![(Vec::new(), 0)];
        for (i, u) in self.blocks.words.iter().enumerate() {
            // blocks are sorted, so the shared prefix with the previous block is on the stack
            while !u.starts_with(&nodes.last().expect("root").0) {
                nodes.pop();
            }
            let mut node = nodes.last().expect("root").1;
            for d in nodes.last().expect("root").0.len()..u.len() - 1 {
                node = b.child(node, u[d], &u[..=d]);
                nodes.push((u[..=d].to_vec(), node));
            }
            b.close(node, u[u.len() - 1], vec![i as Sym]);
        }
        b.finish(self.spec.alphabet(), &self.alphabet)
    }
}

/// Symbol and bigram counts of a sequence `y` over `B`, defining
/// `π̂_a = occ(y,a)/n` and `P̂_ab = occ(y,ab)/occ(y[1..n−1],a)`, with the
/// uniform row `1/M` where `a` never occurs before the last position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmpiricalChain {
    pub m: usize,
    pub length: usize,
    pub symbol_counts: Vec<u64>,
    pub pair_counts: Vec<Vec<u64>>,
    /// `occ(y[1..n−1], a)`, the row sums of `pair_counts`.
    pub row_totals: Vec<u64>,
}

impl EmpiricalChain {
    pub fn from_sequence(y: &[Sym], m: usize) -> Result<Self> {
        if y.len() < 2 {
            return Err(Error::PrefixTooShort { len: y.len(), min: 2 });
        }
        if m == 0 {
            return Err(Error::InvalidArgument("empty block alphabet".into()));
        }
        if let Some(&s) = y.iter().find(|&&s| s as usize >= m) {
            return Err(Error::SymbolOutOfRange(s));
        }
        let mut symbol_counts = vec![0u64; m];
        let mut pair_counts = vec![vec![0u64; m]; m];
        for &s in y {
            symbol_counts[s as usize] += 1;
        }
        for p in y.windows(2) {
            pair_counts[p[0] as usize][p[1] as usize] += 1;
        }
        let row_totals = pair_counts.iter().map(|r| r.iter().sum()).collect();
        Ok(Self { m, length: y.len(), symbol_counts, pair_counts, row_totals })
    }

    pub fn pi_hat(&self) -> Vec<f64> {
        self.symbol_counts.iter().map(|&c| c as f64 / self.length as f64).collect()
    }

    /// `P̂_ab` as an exact fraction.
    pub fn p_entry(&self, a: Sym, b: Sym) -> (u64, u64) {
        let (a, b) = (a as usize, b as usize);
        match self.row_totals[a] {
            0 => (1, self.m as u64),
            t => (self.pair_counts[a][b], t),
        }
    }

    pub fn p_hat(&self) -> Vec<Vec<f64>> {
        (0..self.m)
            .map(|a| {
                (0..self.m)
                    .map(|b| {
                        let (n, d) = self.p_entry(a as Sym, b as Sym);
                        n as f64 / d as f64
                    })
                    .collect()
            })
            .collect()
    }

    /// `ν(u) = (1/M)·Π P̂_{u_i u_{i+1}}` as an exact fraction (not reduced).
    pub fn nu(&self, u: &[Sym]) -> Fraction {
        let mut num = BigUint::one();
        let mut den = BigUint::from(self.m as u64);
        for p in u.windows(2) {
            let (n, d) = self.p_entry(p[0], p[1]);
            if n == 0 {
                return Fraction { num: BigUint::zero(), den: BigUint::one() };
            }
            num *= n;
            den *= d;
        }
        Fraction { num, den }
    }

    /// The measure `ν`, generally not shift invariant.
    pub fn measure(&self) -> Measure {
        Measure::Empirical { m: self.m, p: self.p_hat() }
    }

    /// `h(μ_{π̂,P̂}) = −Σ π̂_a P̂_ab log2 P̂_ab`.
    pub fn entropy(&self) -> f64 {
        markov_entropy(&self.pi_hat(), &self.p_hat())
    }
}

/// A nonnegative rational `num/den`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fraction {
    pub num: BigUint,
    pub den: BigUint,
}

impl Fraction {
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn cmp_value(&self, other: &Fraction) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }

    /// `⌈−log2(num/den)⌉` for a value in `(0, 1]`.
    pub fn ceil_neg_log2(&self) -> u64 {
        debug_assert!(!self.num.is_zero() && self.num <= self.den);
        // smallest L with num·2^L ≥ den
        let mut l = self.den.bits().saturating_sub(self.num.bits());
        while (&self.num << l as usize) < self.den {
            l += 1;
        }
        while l > 0 && (&self.num << (l - 1) as usize) >= self.den {
            l -= 1;
        }
        l
    }
}
