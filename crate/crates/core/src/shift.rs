//! One-sided shifts of finite type presented by a 0/1 transition matrix.

use std::collections::VecDeque;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Sym};
use crate::error::{Error, Result};
use crate::spectral;

/// Default bound on the number of words any enumeration may produce.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 22;

/// A shift of finite type `X_M`: an alphabet and a 0/1 matrix of allowed
/// 2-blocks, indexed in alphabet order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftSpec {
    alphabet: Alphabet,
    matrix: Vec<Vec<bool>>,
}

impl ShiftSpec {
    pub fn from_matrix(alphabet: Alphabet, rows: &[Vec<u8>]) -> Result<Self> {
        let n = alphabet.len();
        if n < 2 {
            return Err(Error::AlphabetTooSmall(n));
        }
        let bad = |reason: String| Error::BadMatrix { expected: n, reason };
        if rows.len() != n {
            return Err(bad(format!("{} rows", rows.len())));
        }
        let mut matrix = Vec::with_capacity(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(bad(format!("row {i} has {} entries", row.len())));
            }
            let mut out = Vec::with_capacity(n);
            for &v in row {
                match v {
                    0 => out.push(false),
                    1 => out.push(true),
                    _ => return Err(bad(format!("entry {v} in row {i}"))),
                }
            }
            matrix.push(out);
        }
        Ok(Self { alphabet, matrix })
    }

    /// Builds the matrix with `m_ab = 0` exactly on the forbidden pairs.
    pub fn from_forbidden<S: AsRef<str>>(alphabet: Alphabet, forbidden: &[S]) -> Result<Self> {
        let n = alphabet.len();
        if n < 2 {
            return Err(Error::AlphabetTooSmall(n));
        }
        let mut matrix = vec![vec![true; n]; n];
        for f in forbidden {
            let f = f.as_ref();
            let chars: Vec<char> = f.chars().collect();
            if chars.len() != 2 {
                return Err(Error::ForbiddenLength(f.to_string()));
            }
            let a = alphabet.index_of(chars[0])?;
            let b = alphabet.index_of(chars[1])?;
            matrix[a as usize][b as usize] = false;
        }
        Ok(Self { alphabet, matrix })
    }

    /// The full shift over `alphabet`.
    pub fn full(alphabet: Alphabet) -> Result<Self> {
        Self::from_forbidden::<&str>(alphabet, &[])
    }

    /// Binary sequences with no two consecutive 1s.
    pub fn golden_mean() -> Self {
        Self::from_forbidden(Alphabet::binary(), &["11"]).expect("valid")
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn size(&self) -> usize {
        self.alphabet.len()
    }

    #[inline]
    pub fn allowed(&self, a: Sym, b: Sym) -> bool {
        self.matrix[a as usize][b as usize]
    }

    pub fn matrix_u8(&self) -> Vec<Vec<u8>> {
        self.matrix
            .iter()
            .map(|r| r.iter().map(|&b| b as u8).collect())
            .collect()
    }

    /// The derived forbidden set `{ab : m_ab = 0}` in lexicographic order.
    pub fn forbidden(&self) -> Vec<String> {
        let mut out = Vec::new();
        for a in 0..self.size() as Sym {
            for b in 0..self.size() as Sym {
                if !self.allowed(a, b) {
                    out.push(self.alphabet.render(&[a, b]));
                }
            }
        }
        out
    }

    /// A copy with the pair `(a, b)` allowed.
    pub fn with_allowed(&self, a: Sym, b: Sym) -> Self {
        let mut s = self.clone();
        s.matrix[a as usize][b as usize] = true;
        s
    }

    /// True iff every adjacent pair of `w` is allowed.
    pub fn is_block(&self, w: &[Sym]) -> Result<bool> {
        self.alphabet.check_word(w)?;
        Ok(w.windows(2).all(|p| self.allowed(p[0], p[1])))
    }

    /// Index of the first disallowed pair, if any.
    pub fn first_violation(&self, w: &[Sym]) -> Option<usize> {
        w.windows(2).position(|p| !self.allowed(p[0], p[1]))
    }

    /// `|B_n(X)|`, computed as the sum of entries of `M^(n-1)`.
    pub fn block_count(&self, n: usize) -> Result<u128> {
        if n == 0 {
            return Ok(1);
        }
        let k = self.size();
        // ends[b] = number of blocks of the current length ending in b
        let mut ends = vec![1u128; k];
        for _ in 1..n {
            let mut next = vec![0u128; k];
            for a in 0..k {
                if ends[a] == 0 {
                    continue;
                }
                for (b, slot) in next.iter_mut().enumerate() {
                    if self.matrix[a][b] {
                        *slot = slot.checked_add(ends[a]).ok_or(Error::Overflow("block count"))?;
                    }
                }
            }
            ends = next;
        }
        ends.iter()
            .try_fold(0u128, |acc, &v| acc.checked_add(v))
            .ok_or(Error::Overflow("block count"))
    }

    /// `n`-th power of the matrix with exact integer entries.
    pub fn matrix_power(&self, n: u32) -> Result<Vec<Vec<u128>>> {
        let k = self.size();
        let mut result: Vec<Vec<u128>> = (0..k)
            .map(|i| (0..k).map(|j| (i == j) as u128).collect())
            .collect();
        for _ in 0..n {
            let mut next = vec![vec![0u128; k]; k];
            for i in 0..k {
                for l in 0..k {
                    if result[i][l] == 0 {
                        continue;
                    }
                    for j in 0..k {
                        if self.matrix[l][j] {
                            next[i][j] = next[i][j]
                                .checked_add(result[i][l])
                                .ok_or(Error::Overflow("matrix power"))?;
                        }
                    }
                }
            }
            result = next;
        }
        Ok(result)
    }

    /// All blocks of length `n` in lexicographic order, capped at the default cap.
    pub fn blocks(&self, n: usize) -> Result<BlockSet> {
        self.blocks_capped(n, DEFAULT_ENUMERATION_CAP)
    }

    pub fn blocks_capped(&self, n: usize, cap: u128) -> Result<BlockSet> {
        if n == 0 {
            return Err(Error::InvalidArgument("block length must be at least 1".into()));
        }
        let count = self.block_count(n)?;
        if count > cap {
            return Err(Error::CapExceeded { requested: count, cap });
        }
        let mut words = Vec::with_capacity(count as usize);
        let mut w: Vec<Sym> = Vec::with_capacity(n);
        self.extend_blocks(&mut w, n, &mut words);
        Ok(BlockSet { length: n, words })
    }

    fn extend_blocks(&self, w: &mut Vec<Sym>, n: usize, out: &mut Vec<Vec<Sym>>) {
        if w.len() == n {
            out.push(w.clone());
            return;
        }
        for c in 0..self.size() as Sym {
            if w.last().is_none_or(|&l| self.allowed(l, c)) {
                w.push(c);
                self.extend_blocks(w, n, out);
                w.pop();
            }
        }
    }

    fn reachable(&self, start: usize, reverse: bool) -> Vec<bool> {
        let k = self.size();
        let mut seen = vec![false; k];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(a) = queue.pop_front() {
            for b in 0..k {
                let edge = if reverse { self.matrix[b][a] } else { self.matrix[a][b] };
                if edge && !seen[b] {
                    seen[b] = true;
                    queue.push_back(b);
                }
            }
        }
        seen
    }

    /// Strong connectivity of the graph `a -> b` for `m_ab = 1`.
    pub fn is_irreducible(&self) -> bool {
        self.reachable(0, false).iter().all(|&s| s) && self.reachable(0, true).iter().all(|&s| s)
    }

    /// The gcd of all cycle lengths. Requires irreducibility.
    pub fn period(&self) -> Result<u64> {
        if !self.is_irreducible() {
            return Err(Error::NotIrreducible);
        }
        let k = self.size();
        let mut level = vec![u64::MAX; k];
        level[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(a) = queue.pop_front() {
            for b in 0..k {
                if self.matrix[a][b] && level[b] == u64::MAX {
                    level[b] = level[a] + 1;
                    queue.push_back(b);
                }
            }
        }
        let mut g = 0u64;
        for a in 0..k {
            for b in 0..k {
                if self.matrix[a][b] {
                    g = g.gcd(&(level[a] + 1).abs_diff(level[b]));
                }
            }
        }
        Ok(g)
    }

    pub fn is_aperiodic(&self) -> Result<bool> {
        Ok(self.period()? == 1)
    }

    /// `log2` of the Perron eigenvalue, in bits per symbol.
    pub fn topological_entropy(&self) -> Result<f64> {
        let p = spectral::perron(self, spectral::DEFAULT_TOL)?;
        Ok(p.lambda.log2())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: ShiftFile = serde_json::from_str(s)?;
        file.into_spec()
    }

    pub fn to_file(&self) -> ShiftFile {
        ShiftFile {
            alphabet: self.alphabet.to_strings(),
            forbidden: None,
            matrix: Some(self.matrix_u8()),
        }
    }
}

/// A set of words of one length, every one a block of the shift.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSet {
    pub length: usize,
    pub words: Vec<Vec<Sym>>,
}

impl BlockSet {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Position of `w` in the (sorted) set.
    pub fn index_of(&self, w: &[Sym]) -> Option<usize> {
        self.words.binary_search_by(|v| v.as_slice().cmp(w)).ok()
    }
}

/// Drops the first `k` symbols: the finite-prefix form of `σ^k`.
pub fn shift_prefix(x: &[Sym], k: usize) -> Result<&[Sym]> {
    if k > x.len() {
        return Err(Error::ShiftTooLarge { k, len: x.len() });
    }
    Ok(&x[k..])
}

/// On-disk shift description: exactly one of `forbidden` or `matrix`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ShiftFile {
    pub alphabet: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forbidden: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<u8>>>,
}

impl ShiftFile {
    pub fn into_spec(self) -> Result<ShiftSpec> {
        let alphabet = Alphabet::from_strings(&self.alphabet)?;
        match (self.forbidden, self.matrix) {
            (Some(f), None) => ShiftSpec::from_forbidden(alphabet, &f),
            (None, Some(m)) => ShiftSpec::from_matrix(alphabet, &m),
            _ => Err(Error::Parse(
                "shift file needs exactly one of \"forbidden\" or \"matrix\"".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::for_each_word;

    fn bin(rows: &[[u8; 2]; 2]) -> ShiftSpec {
        ShiftSpec::from_matrix(Alphabet::binary(), &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
            .unwrap()
    }

    #[test]
    fn golden_mean_from_forbidden() {
        let gm = ShiftSpec::golden_mean();
        assert_eq!(gm.matrix_u8(), vec![vec![1, 1], vec![1, 0]]);
        assert_eq!(gm.forbidden(), vec!["11".to_string()]);
    }

    #[test]
    fn full_and_three_symbol_forbidden() {
        let full = ShiftSpec::full(Alphabet::binary()).unwrap();
        assert_eq!(full.matrix_u8(), vec![vec![1, 1], vec![1, 1]]);
        let abc = Alphabet::new(vec!['a', 'b', 'c']).unwrap();
        let s = ShiftSpec::from_forbidden(abc, &["ab", "ba"]).unwrap();
        assert_eq!(s.matrix_u8(), vec![vec![1, 0, 1], vec![0, 1, 1], vec![1, 1, 1]]);
    }

    #[test]
    fn forbidden_errors() {
        assert!(matches!(
            ShiftSpec::from_forbidden(Alphabet::binary(), &["110"]),
            Err(Error::ForbiddenLength(_))
        ));
        assert!(matches!(
            ShiftSpec::from_forbidden(Alphabet::binary(), &["12"]),
            Err(Error::UnknownSymbol('2'))
        ));
        let one = Alphabet::new(vec!['0']).unwrap();
        assert!(matches!(ShiftSpec::full(one), Err(Error::AlphabetTooSmall(1))));
    }

    #[test]
    fn matrix_validation() {
        let a = Alphabet::binary();
        assert!(ShiftSpec::from_matrix(a.clone(), &[vec![1, 2], vec![1, 1]]).is_err());
        assert!(ShiftSpec::from_matrix(a.clone(), &[vec![1, 1]]).is_err());
        assert!(ShiftSpec::from_matrix(a, &[vec![1], vec![1, 1]]).is_err());
    }

    #[test]
    fn forbidden_roundtrips_matrix() {
        let s = ShiftSpec::from_forbidden(Alphabet::new(vec!['a', 'b', 'c']).unwrap(), &["ac", "cc", "ba"]).unwrap();
        let again = ShiftSpec::from_forbidden(s.alphabet().clone(), &s.forbidden()).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn block_membership() {
        let gm = ShiftSpec::golden_mean();
        let a = gm.alphabet().clone();
        assert!(gm.is_block(&a.parse_word("0101").unwrap()).unwrap());
        assert!(!gm.is_block(&a.parse_word("0110").unwrap()).unwrap());
        assert!(gm.is_block(&[]).unwrap());
        assert!(gm.is_block(&[1]).unwrap());
        assert!(gm.is_block(&[2]).is_err());
        let full = ShiftSpec::full(a).unwrap();
        for_each_word(2, 6, |w| assert!(full.is_block(w).unwrap()));
    }

    #[test]
    fn golden_mean_blocks() {
        let gm = ShiftSpec::golden_mean();
        let a = gm.alphabet();
        let b2: Vec<String> = gm.blocks(2).unwrap().words.iter().map(|w| a.render(w)).collect();
        assert_eq!(b2, ["00", "01", "10"]);
        let b3: Vec<String> = gm.blocks(3).unwrap().words.iter().map(|w| a.render(w)).collect();
        assert_eq!(b3, ["000", "001", "010", "100", "101"]);
        let full = ShiftSpec::full(a.clone()).unwrap();
        assert_eq!(full.blocks(3).unwrap().len(), 8);
        assert!(gm.blocks(0).is_err());
    }

    #[test]
    fn brute_force_block_oracle() {
        // filter all 2^3 words by the absence of "11"
        let gm = ShiftSpec::golden_mean();
        let mut brute = Vec::new();
        for_each_word(2, 3, |w| {
            if !w.windows(2).any(|p| p == [1, 1]) {
                brute.push(w.to_vec());
            }
        });
        assert_eq!(gm.blocks(3).unwrap().words, brute);
    }

    #[test]
    fn enumeration_cap() {
        let full = ShiftSpec::full(Alphabet::binary()).unwrap();
        assert!(matches!(full.blocks_capped(5, 16), Err(Error::CapExceeded { requested: 32, cap: 16 })));
        assert_eq!(full.blocks_capped(4, 16).unwrap().len(), 16);
    }

    #[test]
    fn irreducibility() {
        assert!(ShiftSpec::golden_mean().is_irreducible());
        assert!(!bin(&[[1, 1], [0, 1]]).is_irreducible());
        assert!(ShiftSpec::full(Alphabet::binary()).unwrap().is_irreducible());
    }

    #[test]
    fn aperiodicity() {
        assert!(ShiftSpec::golden_mean().is_aperiodic().unwrap());
        assert!(!bin(&[[0, 1], [1, 0]]).is_aperiodic().unwrap());
        assert_eq!(bin(&[[0, 1], [1, 0]]).period().unwrap(), 2);
        assert!(ShiftSpec::full(Alphabet::binary()).unwrap().is_aperiodic().unwrap());
        assert!(matches!(bin(&[[1, 1], [0, 1]]).is_aperiodic(), Err(Error::NotIrreducible)));
        // 3-cycle
        let c3 = ShiftSpec::from_matrix(
            Alphabet::new(vec!['a', 'b', 'c']).unwrap(),
            &[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]],
        )
        .unwrap();
        assert_eq!(c3.period().unwrap(), 3);
    }

    #[test]
    fn entropies() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let h = ShiftSpec::golden_mean().topological_entropy().unwrap();
        assert!((h - phi.log2()).abs() < 1e-12);
        assert!((h - 0.6942419136).abs() < 1e-9);
        assert!((ShiftSpec::full(Alphabet::binary()).unwrap().topological_entropy().unwrap() - 1.0).abs() < 1e-12);
        for k in 2..7 {
            let s = ShiftSpec::full(Alphabet::generated(k)).unwrap();
            assert!((s.topological_entropy().unwrap() - (k as f64).log2()).abs() < 1e-12);
        }
        assert!(matches!(bin(&[[1, 1], [0, 1]]).topological_entropy(), Err(Error::NotIrreducible)));
    }

    #[test]
    fn growth_rate_approaches_entropy_from_above() {
        let gm = ShiftSpec::golden_mean();
        let h = gm.topological_entropy().unwrap();
        let n = 20;
        let rate = (gm.block_count(n).unwrap() as f64).log2() / n as f64;
        assert!(rate > h);
        assert!(rate - h < 0.1);
    }

    #[test]
    fn shift_prefix_cases() {
        let a = Alphabet::binary();
        let x = a.parse_word("0100").unwrap();
        assert_eq!(a.render(shift_prefix(&x, 1).unwrap()), "100");
        assert_eq!(shift_prefix(&x, 0).unwrap(), &x[..]);
        assert!(shift_prefix(&x, 4).unwrap().is_empty());
        assert!(matches!(shift_prefix(&x, 5), Err(Error::ShiftTooLarge { .. })));
    }

    #[test]
    fn file_formats() {
        let s = ShiftSpec::from_json(r#"{"alphabet": ["0","1"], "forbidden": ["11"]}"#).unwrap();
        assert_eq!(s, ShiftSpec::golden_mean());
        let m = ShiftSpec::from_json(r#"{"alphabet": ["0","1"], "matrix": [[1,1],[1,0]]}"#).unwrap();
        assert_eq!(m, s);
        assert!(ShiftSpec::from_json(r#"{"alphabet": ["0","1"]}"#).is_err());
        assert!(ShiftSpec::from_json(r#"{"alphabet": ["0","1"], "forbidden": [], "matrix": [[1,1],[1,1]]}"#).is_err());
        let rt = serde_json::to_string(&s.to_file()).unwrap();
        assert_eq!(ShiftSpec::from_json(&rt).unwrap(), s);
    }
}
