//! The block code `C_k: B^k → {0,1}*` built from an empirical chain.
//!
//! Blocks of zero `ν`-measure (`S`) get a marker `0` and a fixed-length
//! index; the others (`T`) get a marker `1` and a canonical prefix code whose
//! lengths are `⌈−log2 ν(u)⌉`. `ν` is exact, so `S` is exact too.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::alphabet::{checked_word_count, for_each_word, word_key, Alphabet, Sym};
use crate::error::{Error, Result};
use crate::shift::DEFAULT_ENUMERATION_CAP;
use crate::transducer::{ratio_f64, Transducer};

use super::chain::{EmpiricalChain, Fraction};
use super::recoder::TrieBuilder;

#[derive(Clone, Debug)]
pub struct BlockCode {
    k: usize,
    m: usize,
    /// `C_k(u)` indexed by `word_key(u, m)`.
    codes: Vec<Vec<Sym>>,
    s_count: usize,
    s_len: u64,
    /// Binary decoding trie: `children[node] = [on 0, on 1]`, leaves hold the block key.
    children: Vec<[u32; 2]>,
    leaf: Vec<Option<u64>>,
}

const NIL: u32 = u32::MAX;

impl BlockCode {
    pub fn build(chain: &EmpiricalChain, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("block length k must be at least 1".into()));
        }
        let m = chain.m;
        let total = checked_word_count(m, k, DEFAULT_ENUMERATION_CAP)? as usize;
        let mut s_keys = Vec::new();
        let mut t_items: Vec<(Fraction, u64)> = Vec::new();
        for_each_word(m, k, |u| {
            let key = word_key(u, m);
            let nu = chain.nu(u);
            if nu.is_zero() {
                s_keys.push(key);
            } else {
                t_items.push((nu, key));
            }
        });

        let mut codes = vec![Vec::new(); total];
        let s_len = ceil_log2(s_keys.len() as u64);
        for (i, &key) in s_keys.iter().enumerate() {
            let mut c = vec![0];
            c.extend(bits_of(&BigUint::from(i as u64), s_len));
            codes[key as usize] = c;
        }

        // nonincreasing ν, lexicographic tie-break; keys are lexicographic
        t_items.sort_by(|(na, ka), (nb, kb)| nb.cmp_value(na).then(ka.cmp(kb)));
        let lengths: Vec<u64> = t_items.iter().map(|(nu, _)| nu.ceil_neg_log2()).collect();
        let mut counter = BigUint::zero();
        let mut prev = lengths.first().copied().unwrap_or(0);
        for (i, ((_, key), &len)) in t_items.iter().zip(&lengths).enumerate() {
            if i > 0 {
                counter += 1u32;
            }
            counter <<= (len - prev) as usize;
            prev = len;
            if counter.bits() > len {
                return Err(Error::KraftAssignment(len));
            }
            let mut c = vec![1];
            c.extend(bits_of(&counter, len));
            codes[*key as usize] = c;
        }

        let mut code = Self { k, m, codes, s_count: s_keys.len(), s_len, children: vec![[NIL; 2]], leaf: vec![None] };
        code.build_trie()?;
        Ok(code)
    }

    fn build_trie(&mut self) -> Result<()> {
        for key in 0..self.codes.len() {
            let mut node = 0usize;
            for &bit in &self.codes[key] {
                if self.leaf[node].is_some() {
                    return Err(Error::KraftAssignment(self.codes[key].len() as u64));
                }
                let next = self.children[node][bit as usize];
                node = if next == NIL {
                    self.children.push([NIL; 2]);
                    self.leaf.push(None);
                    let id = self.children.len() - 1;
                    self.children[node][bit as usize] = id as u32;
                    id
                } else {
                    next as usize
                };
            }
            if self.leaf[node].is_some() || self.children[node] != [NIL; 2] {
                return Err(Error::KraftAssignment(self.codes[key].len() as u64));
            }
            self.leaf[node] = Some(key as u64);
        }
        Ok(())
    }

    pub fn block_length(&self) -> usize {
        self.k
    }

    pub fn alphabet_size(&self) -> usize {
        self.m
    }

    pub fn s_count(&self) -> usize {
        self.s_count
    }

    pub fn t_count(&self) -> usize {
        self.codes.len() - self.s_count
    }

    /// `L = ⌈log2 |S|⌉`.
    pub fn s_len(&self) -> u64 {
        self.s_len
    }

    /// `C_k(u)` for `u ∈ B^k`.
    pub fn codeword(&self, u: &[Sym]) -> Result<&[Sym]> {
        if u.len() != self.k || u.iter().any(|&s| s as usize >= self.m) {
            return Err(Error::InvalidArgument(format!("block must be a word of length {} over {} symbols", self.k, self.m)));
        }
        Ok(&self.codes[word_key(u, self.m) as usize])
    }

    /// Concatenated codewords of the whole `k`-blocks of `y`, plus the
    /// number of trailing symbols dropped.
    pub fn encode(&self, y: &[Sym]) -> Result<(Vec<Sym>, usize)> {
        let mut out = Vec::new();
        for u in y.chunks_exact(self.k) {
            out.extend_from_slice(self.codeword(u)?);
        }
        Ok((out, y.len() % self.k))
    }

    pub fn decode(&self, bits: &[Sym]) -> Result<Vec<Sym>> {
        let mut out = Vec::new();
        let mut node = 0usize;
        for (i, &b) in bits.iter().enumerate() {
            if b > 1 {
                return Err(Error::Decode(format!("bit {i} is not 0 or 1")));
            }
            let next = self.children[node][b as usize];
            if next == NIL {
                return Err(Error::Decode(format!("no codeword continues at bit {i}")));
            }
            node = next as usize;
            if let Some(key) = self.leaf[node] {
                out.extend(crate::alphabet::key_word(key, self.m, self.k));
                node = 0;
            }
        }
        if node != 0 {
            return Err(Error::Decode("input ends inside a codeword".into()));
        }
        Ok(out)
    }

    /// `Σ 2^{−|C_T(u)|}` over `T` as `num / 2^log2_den`.
    pub fn kraft_sum_t(&self) -> (BigUint, u64) {
        let lens: Vec<u64> =
            self.codes.iter().filter(|c| c[0] == 1).map(|c| c.len() as u64 - 1).collect();
        let top = lens.iter().copied().max().unwrap_or(0);
        let num = lens.iter().fold(BigUint::zero(), |acc, &l| acc + (BigUint::one() << (top - l) as usize));
        (num, top)
    }

    pub fn summary(&self) -> CodeSummary {
        let mut hist = BTreeMap::new();
        for c in &self.codes {
            *hist.entry(c.len() as u64).or_insert(0u64) += 1;
        }
        let (num, den) = self.kraft_sum_t();
        CodeSummary {
            k: self.k,
            m: self.m,
            s_count: self.s_count,
            t_count: self.t_count(),
            s_len: self.s_len,
            length_histogram: hist,
            kraft_t_numerator: num.to_string(),
            kraft_t_denominator_log2: den,
            kraft_t: ratio_f64(&num, den),
        }
    }

    /// The block transducer over `B` reading `k` symbols and writing `C_k(u)`.
    pub fn to_transducer(&self, input: &Alphabet) -> Result<Transducer> {
        if input.len() != self.m {
            return Err(Error::AlphabetMismatch(format!("code has {} symbols, alphabet {}", self.m, input.len())));
        }
        let mut b = TrieBuilder::new(self.m);
        let mut u = Vec::with_capacity(self.k);
        self.trie(&mut b, 0, &mut u);
        b.finish(input, &Alphabet::binary())
    }

    fn trie(&self, b: &mut TrieBuilder, node: usize, u: &mut Vec<Sym>) {
        for s in 0..self.m as Sym {
            u.push(s);
            if u.len() == self.k {
                b.close(node, s, self.codes[word_key(u, self.m) as usize].clone());
            } else {
                let child = b.child(node, s, u);
                self.trie(b, child, u);
            }
            u.pop();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeSummary {
    pub k: usize,
    pub m: usize,
    pub s_count: usize,
    pub t_count: usize,
    pub s_len: u64,
    /// Codeword length (marker included) ↦ count.
    pub length_histogram: BTreeMap<u64, u64>,
    pub kraft_t_numerator: String,
    pub kraft_t_denominator_log2: u64,
    pub kraft_t: f64,
}

fn ceil_log2(n: u64) -> u64 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros() as u64
    }
}

/// The low `len` bits of `v`, most significant first.
fn bits_of(v: &BigUint, len: u64) -> Vec<Sym> {
    (0..len).rev().map(|i| v.bit(i) as Sym).collect()
}
