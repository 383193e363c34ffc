//! Occurrence counts, aligned occurrence counts and block entropies.
//!
//! Positions are 1-based. An occurrence of `u` at position `i` belongs to
//! offset class `r ∈ 1..=|u|` with `i ≡ r (mod |u|)`; class `|u|` stands for
//! residue 0, and `alocc(w, u)` means offset 1.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alphabet::{key_word, word_key, Alphabet, Sym};
use crate::error::{Error, Result};
use crate::measure::phi;

/// Number of (possibly overlapping) occurrences of `u` in `w`.
pub fn occ(w: &[Sym], u: &[Sym]) -> usize {
    if u.is_empty() || u.len() > w.len() {
        return 0;
    }
    w.windows(u.len()).filter(|win| *win == u).count()
}

/// Occurrences of `u` in `w` at positions `i ≡ r (mod |u|)`.
pub fn alocc(w: &[Sym], u: &[Sym], r: usize) -> Result<usize> {
    let l = u.len();
    if l == 0 || r == 0 || r > l {
        return Err(Error::OffsetOutOfRange { r, len: l });
    }
    if l > w.len() {
        return Ok(0);
    }
    // position i = idx + 1; i ≡ r (mod l)  <=>  idx ≡ r - 1 (mod l)
    Ok(w[r - 1..]
        .windows(l)
        .step_by(l)
        .filter(|win| *win == u)
        .count())
}

/// Maximum of `alocc(v, w, r)` over the `|w|` offsets.
pub fn alocc_star(v: &[Sym], w: &[Sym]) -> usize {
    (1..=w.len()).map(|r| alocc(v, w, r).unwrap_or(0)).max().unwrap_or(0)
}

/// `P(w, u) = ℓ · alocc(u, w) / |u|`; `|u|` must be a multiple of `ℓ = |w|`.
pub fn relative_frequency(u: &[Sym], w: &[Sym]) -> Result<f64> {
    let l = w.len();
    if l == 0 {
        return Err(Error::InvalidArgument("block length must be at least 1".into()));
    }
    if u.is_empty() || u.len() % l != 0 {
        return Err(Error::NotMultiple { len: u.len(), block: l });
    }
    Ok((l * alocc(u, w, 1)?) as f64 / u.len() as f64)
}

/// Aligned block counts of `u` cut into consecutive blocks of length `l`.
fn aligned_counts(u: &[Sym], l: usize) -> BTreeMap<&[Sym], u64> {
    let mut counts = BTreeMap::new();
    for chunk in u.chunks_exact(l) {
        *counts.entry(chunk).or_insert(0u64) += 1;
    }
    counts
}

/// `h_ℓ(u) = −(1/ℓ) Σ_w P(w,u) log2 P(w,u)`.
pub fn block_entropy(u: &[Sym], l: usize) -> Result<f64> {
    if l == 0 {
        return Err(Error::InvalidArgument("block length must be at least 1".into()));
    }
    if u.is_empty() || u.len() % l != 0 {
        return Err(Error::NotMultiple { len: u.len(), block: l });
    }
    let k = (u.len() / l) as f64;
    let s: f64 = aligned_counts(u, l).values().map(|&c| phi(c as f64 / k)).sum();
    Ok(s / l as f64)
}

/// Finite-prefix estimate of `h_ℓ(x) = liminf_k h_ℓ(x[1..kℓ])`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockEntropyEstimate {
    pub block_length: usize,
    /// Largest `k` with `kℓ ≤ |x|`.
    pub blocks: usize,
    /// `h_ℓ(x[1..kℓ])` at that `k`.
    pub value: f64,
    /// Min and max of `h_ℓ(x[1..jℓ])` over the last 10% of `j ≤ k`.
    pub trailing_min: f64,
    pub trailing_max: f64,
}

pub fn block_entropy_prefix(x: &[Sym], l: usize) -> Result<BlockEntropyEstimate> {
    if l == 0 {
        return Err(Error::InvalidArgument("block length must be at least 1".into()));
    }
    if x.len() < l {
        return Err(Error::PrefixTooShort { len: x.len(), min: l });
    }
    let k = x.len() / l;
    let window_start = k - k / 10;
    // h = (log2 j − (1/j) Σ c log2 c) / ℓ, maintained incrementally
    let mut counts: BTreeMap<&[Sym], u64> = BTreeMap::new();
    let mut c_log_c = 0.0f64;
    let (mut lo, mut hi, mut value) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    let xlogx = |c: u64| if c == 0 { 0.0 } else { c as f64 * (c as f64).log2() };
    for (j, chunk) in x.chunks_exact(l).enumerate() {
        let c = counts.entry(chunk).or_insert(0);
        c_log_c += xlogx(*c + 1) - xlogx(*c);
        *c += 1;
        let j = j + 1;
        if j >= window_start {
            let jf = j as f64;
            value = if counts.len() == 1 { 0.0 } else { (jf.log2() - c_log_c / jf).max(0.0) / l as f64 };
            lo = lo.min(value);
            hi = hi.max(value);
        }
    }
    Ok(BlockEntropyEstimate { block_length: l, blocks: k, value, trailing_min: lo, trailing_max: hi })
}

/// Per-block occurrence statistics of a word, for one block length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OccurrenceTable {
    word_length: usize,
    prefix_length: usize,
    radix: usize,
    /// block key -> (occ, aligned counts for offsets 1..=ℓ)
    counts: BTreeMap<u64, OccEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OccEntry {
    pub occ: u64,
    /// `aligned[r - 1]` counts occurrences at positions `≡ r (mod ℓ)`.
    pub aligned: Vec<u64>,
}

impl OccurrenceTable {
    /// Single pass with a rolling window over `x`.
    pub fn build(x: &[Sym], l: usize, radix: usize) -> Result<Self> {
        let mut t = Self::empty(l, radix)?;
        t.prefix_length = x.len();
        t.count_range(x, 0, x.len().saturating_sub(l.saturating_sub(1)));
        Ok(t)
    }

    /// Counts chunks in parallel. Each chunk owns the occurrences starting
    /// inside it and reads `ℓ − 1` symbols past its end, so the merged
    /// table equals [`OccurrenceTable::build`].
    pub fn build_chunked(x: &[Sym], l: usize, radix: usize, chunk: usize) -> Result<Self> {
        let base = Self::empty(l, radix)?;
        let starts = x.len().saturating_sub(l - 1);
        let chunk = chunk.max(1);
        let parts: Vec<Self> = (0..starts.div_ceil(chunk))
            .into_par_iter()
            .map(|c| {
                let mut t = base.clone();
                t.count_range(x, c * chunk, ((c + 1) * chunk).min(starts));
                t
            })
            .collect();
        let mut out = base;
        out.prefix_length = x.len();
        for p in parts {
            out.merge(p);
        }
        Ok(out)
    }

    fn empty(l: usize, radix: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidArgument("block length must be at least 1".into()));
        }
        if (radix as f64).powi(l as i32) >= u64::MAX as f64 {
            return Err(Error::Overflow("block key"));
        }
        Ok(Self { word_length: l, prefix_length: 0, radix, counts: BTreeMap::new() })
    }

    /// Counts occurrences starting at 0-based indices `from..to`.
    fn count_range(&mut self, x: &[Sym], from: usize, to: usize) {
        let l = self.word_length;
        if from >= to {
            return;
        }
        let modulus = (self.radix as u64).pow(l as u32 - 1);
        let mut key = word_key(&x[from..from + l - 1], self.radix);
        for idx in from..to {
            key = (key % modulus) * self.radix as u64 + x[idx + l - 1] as u64;
            let e = self.counts.entry(key).or_insert_with(|| OccEntry { occ: 0, aligned: vec![0; l] });
            e.occ += 1;
            e.aligned[idx % l] += 1;
        }
    }

    /// Adds the counts of `other` (same block length) into `self`.
    pub fn merge(&mut self, other: Self) {
        for (k, e) in other.counts {
            let mine = self
                .counts
                .entry(k)
                .or_insert_with(|| OccEntry { occ: 0, aligned: vec![0; self.word_length] });
            mine.occ += e.occ;
            for (a, b) in mine.aligned.iter_mut().zip(e.aligned) {
                *a += b;
            }
        }
    }

    pub fn word_length(&self) -> usize {
        self.word_length
    }

    pub fn prefix_length(&self) -> usize {
        self.prefix_length
    }

    pub fn entry(&self, u: &[Sym]) -> Option<&OccEntry> {
        self.counts.get(&word_key(u, self.radix))
    }

    pub fn occ(&self, u: &[Sym]) -> u64 {
        self.entry(u).map_or(0, |e| e.occ)
    }

    /// Aligned count at offset `r ∈ 1..=ℓ`.
    pub fn alocc(&self, u: &[Sym], r: usize) -> u64 {
        self.entry(u).map_or(0, |e| e.aligned[r - 1])
    }

    /// Iterates `(block, entry)` in lexicographic block order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<Sym>, &OccEntry)> {
        self.counts
            .iter()
            .map(|(&k, e)| (key_word(k, self.radix, self.word_length), e))
    }

    pub fn to_report(&self, alphabet: &Alphabet) -> OccurrenceReport {
        OccurrenceReport {
            word_length: self.word_length,
            prefix_length: self.prefix_length,
            entries: self
                .iter()
                .map(|(w, e)| OccurrenceRow { block: alphabet.render(&w), occ: e.occ, aligned: e.aligned.clone() })
                .collect(),
        }
    }
}

/// JSON form of an [`OccurrenceTable`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccurrenceReport {
    pub word_length: usize,
    pub prefix_length: usize,
    pub entries: Vec<OccurrenceRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccurrenceRow {
    pub block: String,
    pub occ: u64,
    pub aligned: Vec<u64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab(s: &str) -> Vec<Sym> {
        Alphabet::new(vec!['a', 'b']).unwrap().parse_word(s).unwrap()
    }

    fn bin(s: &str) -> Vec<Sym> {
        Alphabet::binary().parse_word(s).unwrap()
    }

    #[test]
    fn aaaa_triple() {
        assert_eq!(occ(&ab("aaaa"), &ab("aa")), 3);
        assert_eq!(alocc(&ab("aaaa"), &ab("aa"), 1).unwrap(), 2);
        assert_eq!(alocc(&ab("aaaa"), &ab("aa"), 2).unwrap(), 1);
    }

    #[test]
    fn occ_cases() {
        let w = ab("abba");
        assert_eq!(occ(&w, &w), 1);
        assert_eq!(occ(&ab("ababa"), &ab("aba")), 2);
        assert_eq!(occ(&ab("ab"), &ab("aba")), 0);
    }

    #[test]
    fn alocc_cases() {
        assert!(alocc(&ab("aaaa"), &ab("aa"), 0).is_err());
        assert!(alocc(&ab("aaaa"), &ab("aa"), 3).is_err());
        let total: usize = (1..=2).map(|r| alocc(&ab("aaaa"), &ab("aa"), r).unwrap()).sum();
        assert_eq!(total, 3);
        assert_eq!(alocc_star(&ab("aaaa"), &ab("aa")), 2);
        let w = ab("abbab");
        assert_eq!(alocc_star(&w, &w), 1);
        assert_eq!(alocc_star(&ab("abab"), &ab("ba")), 1);
    }

    #[test]
    fn relative_frequency_cases() {
        assert_eq!(relative_frequency(&bin("0101"), &bin("01")).unwrap(), 1.0);
        assert_eq!(relative_frequency(&bin("0110"), &bin("01")).unwrap(), 0.5);
        assert!(relative_frequency(&bin("011"), &bin("01")).is_err());
        let u = bin("011000101101");
        let mut total = 0.0;
        crate::alphabet::for_each_word(2, 2, |w| total += relative_frequency(&u, w).unwrap());
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn block_entropy_cases() {
        for l in 1..5 {
            assert_eq!(block_entropy(&bin("000000000000"), l).unwrap(), 0.0);
        }
        assert_eq!(block_entropy(&bin("01010101"), 1).unwrap(), 1.0);
        assert_eq!(block_entropy(&bin("01010101"), 2).unwrap(), 0.0);
        assert!(block_entropy(&bin("010"), 2).is_err());
    }

    #[test]
    fn block_entropy_prefix_cases() {
        let x = bin("0000000000000");
        for l in 1..5 {
            assert_eq!(block_entropy_prefix(&x, l).unwrap().value, 0.0);
        }
        let y = bin("0110100");
        assert_eq!(block_entropy_prefix(&y, y.len()).unwrap().value, 0.0);
        let z = bin("01010101011");
        let est = block_entropy_prefix(&z, 2).unwrap();
        assert_eq!(est.blocks, 5);
        assert!((est.value - block_entropy(&z[..10], 2).unwrap()).abs() < 1e-12);
        assert!(est.trailing_min <= est.value && est.value <= est.trailing_max);
    }

    #[test]
    fn table_matches_direct_counts() {
        let x = bin("0110100110010110");
        for l in 1..=4 {
            let t = OccurrenceTable::build(&x, l, 2).unwrap();
            crate::alphabet::for_each_word(2, l, |u| {
                assert_eq!(t.occ(u), occ(&x, u) as u64);
                for r in 1..=l {
                    assert_eq!(t.alocc(u, r), alocc(&x, u, r).unwrap() as u64);
                }
            });
            let s: u64 = t.iter().map(|(_, e)| e.aligned[0]).sum();
            assert!(s <= (x.len() / l) as u64);
        }
    }

    #[test]
    fn chunked_equals_single_pass() {
        let x: Vec<Sym> = (0..5000u32).map(|i| (i * 7 + i / 3) % 3).collect();
        for l in 1..=4 {
            let a = OccurrenceTable::build(&x, l, 3).unwrap();
            for chunk in [1, 7, 100, 4999, 10_000] {
                assert_eq!(OccurrenceTable::build_chunked(&x, l, 3, chunk).unwrap(), a);
            }
        }
    }

    #[test]
    fn short_inputs() {
        let t = OccurrenceTable::build(&bin("01"), 3, 2).unwrap();
        assert_eq!(t.iter().count(), 0);
        let t = OccurrenceTable::build_chunked(&bin("01"), 3, 2, 4).unwrap();
        assert_eq!(t.iter().count(), 0);
        assert!(OccurrenceTable::build(&bin("01"), 0, 2).is_err());
    }
}
