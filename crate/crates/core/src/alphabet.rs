//! Ordered alphabets of single-glyph symbols.
//!
//! Symbols are stored by index (`Sym`) in alphabet order; glyphs only appear
//! at the file-format boundary.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a symbol inside its alphabet.
pub type Sym = u32;

/// An ordered list of distinct glyphs.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    glyphs: Vec<char>,
    index: HashMap<char, Sym>,
}

impl Alphabet {
    /// Builds an alphabet, rejecting duplicates. Sizes below 2 are allowed
    /// here; shift specs enforce the lower bound themselves.
    pub fn new(glyphs: Vec<char>) -> Result<Self> {
        let mut index = HashMap::with_capacity(glyphs.len());
        for (i, &g) in glyphs.iter().enumerate() {
            if index.insert(g, i as Sym).is_some() {
                return Err(Error::DuplicateSymbol(g));
            }
        }
        Ok(Self { glyphs, index })
    }

    /// Parses glyph strings as used in JSON files; each must be one char.
    pub fn from_strings<S: AsRef<str>>(symbols: &[S]) -> Result<Self> {
        let mut glyphs = Vec::with_capacity(symbols.len());
        for s in symbols {
            let s = s.as_ref();
            let mut chars = s.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => glyphs.push(c),
                _ => return Err(Error::Parse(format!("symbol {s:?} is not a single glyph"))),
            }
        }
        Self::new(glyphs)
    }

    /// The binary alphabet `{0, 1}`.
    pub fn binary() -> Self {
        Self::new(vec!['0', '1']).expect("distinct")
    }

    /// `size` glyphs drawn from a fixed pool: digits, lowercase, uppercase,
    /// then consecutive code points from U+0100.
    pub fn generated(size: usize) -> Self {
        const POOL: &str = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
        let mut glyphs: Vec<char> = POOL.chars().take(size).collect();
        let mut cp = 0x100u32;
        while glyphs.len() < size {
            if let Some(c) = char::from_u32(cp) {
                glyphs.push(c);
            }
            cp += 1;
        }
        Self::new(glyphs).expect("pool glyphs are distinct")
    }

    pub fn len(&self) -> usize {
        self.glyphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.glyphs.is_empty()
    }

    pub fn glyphs(&self) -> &[char] {
        &self.glyphs
    }

    pub fn glyph(&self, s: Sym) -> char {
        self.glyphs[s as usize]
    }

    pub fn index_of(&self, c: char) -> Result<Sym> {
        self.index.get(&c).copied().ok_or(Error::UnknownSymbol(c))
    }

    pub fn contains(&self, c: char) -> bool {
        self.index.contains_key(&c)
    }

    /// Converts a string to symbol indices; every char must be in the alphabet.
    pub fn parse_word(&self, s: &str) -> Result<Vec<Sym>> {
        s.chars().map(|c| self.index_of(c)).collect()
    }

    /// Like [`Alphabet::parse_word`] but skips whitespace, as sequence files do.
    pub fn parse_sequence(&self, s: &str) -> Result<Vec<Sym>> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| self.index_of(c))
            .collect()
    }

    pub fn render(&self, w: &[Sym]) -> String {
        w.iter().map(|&s| self.glyph(s)).collect()
    }

    pub fn check_word(&self, w: &[Sym]) -> Result<()> {
        match w.iter().find(|&&s| s as usize >= self.len()) {
            Some(&s) => Err(Error::SymbolOutOfRange(s)),
            None => Ok(()),
        }
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.glyphs.iter().map(|c| c.to_string()).collect()
    }

    /// Same glyph set, ignoring order.
    pub fn same_set(&self, other: &Alphabet) -> bool {
        self.len() == other.len() && self.glyphs.iter().all(|&c| other.contains(c))
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.glyphs).finish()
    }
}

impl Serialize for Alphabet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Alphabet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        Alphabet::from_strings(&v).map_err(serde::de::Error::custom)
    }
}

/// Encodes a word as an integer key in base `radix` (first symbol most significant),
/// so numeric order equals lexicographic order for words of equal length.
pub fn word_key(w: &[Sym], radix: usize) -> u64 {
    w.iter().fold(0u64, |acc, &s| acc * radix as u64 + s as u64)
}

/// Inverse of [`word_key`] for a known length.
pub fn key_word(mut key: u64, radix: usize, len: usize) -> Vec<Sym> {
    let mut w = vec![0; len];
    for slot in w.iter_mut().rev() {
        *slot = (key % radix as u64) as Sym;
        key /= radix as u64;
    }
    w
}

/// Calls `f` on every word of length `len` over `radix` symbols in
/// lexicographic order.
pub fn for_each_word(radix: usize, len: usize, mut f: impl FnMut(&[Sym])) {
    let mut w = vec![0 as Sym; len];
    loop {
        f(&w);
        let mut i = len;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if (w[i] as usize) + 1 < radix {
                w[i] += 1;
                break;
            }
            w[i] = 0;
        }
    }
}

/// `radix^len`, or an error if that exceeds `cap`.
pub fn checked_word_count(radix: usize, len: usize, cap: u128) -> Result<u128> {
    let mut n: u128 = 1;
    for _ in 0..len {
        n = n
            .checked_mul(radix as u128)
            .ok_or(Error::CapExceeded { requested: u128::MAX, cap })?;
        if n > cap {
            return Err(Error::CapExceeded { requested: n, cap });
        }
    }
    Ok(n)
}
