//! Finite-prefix estimators for the three equivalent normality definitions.
//!
//! Normality is a limit property; these testers only compare block
//! frequencies of the longest available prefix against a target measure and
//! threshold the largest deviation. A "consistent" verdict is evidence, never
//! a proof.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::alphabet::{checked_word_count, for_each_word, key_word, word_key, Alphabet, Sym};
use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::shift::{shift_prefix, ShiftSpec, DEFAULT_ENUMERATION_CAP};

pub const DEFAULT_L_MAX: usize = 4;
pub const DEFAULT_K_MAX: usize = 8;
/// Required prefix length per unit of `ℓ_max`.
pub const DEFAULT_MIN_MASS: usize = 100;

/// `max(0.01, 3·sqrt(ln n / n))`.
pub fn default_tol(n: usize) -> f64 {
    let n = n.max(2) as f64;
    (3.0 * (n.ln() / n).sqrt()).max(0.01)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Definition {
    Aligned,
    Strong,
    Nonaligned,
}

impl Definition {
    pub const ALL: [Definition; 3] = [Definition::Aligned, Definition::Strong, Definition::Nonaligned];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Inconsistent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockRow {
    pub block: String,
    pub estimate: f64,
    pub target: f64,
    pub deviation: f64,
}

/// Frequencies of all length-`ℓ` words for one shifted prefix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub block_length: usize,
    /// Number of counted windows (the denominator `n`).
    pub windows: u64,
    pub estimate_sum: f64,
    pub max_deviation: f64,
    /// Observed words that are not blocks of the shift.
    pub out_of_shift: usize,
    pub rows: Vec<BlockRow>,
}

impl LevelReport {
    /// Mass-conservation check: if no estimate exceeds its target by more
    /// than `tol`, none falls short by more than `|A|^ℓ·tol`.
    pub fn lower_bound_follows(&self, tol: f64, radix: usize) -> bool {
        if self.rows.iter().any(|r| r.estimate > r.target + tol) {
            return true;
        }
        let slack = (radix as f64).powi(self.block_length as i32) * tol;
        self.rows.iter().all(|r| r.estimate >= r.target - slack - 1e-12)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftRun {
    /// Number of leading symbols dropped before counting.
    pub shift: usize,
    pub levels: Vec<LevelReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefinitionResult {
    pub definition: Definition,
    pub verdict: Verdict,
    pub max_deviation: f64,
    pub shifts_tested: Vec<usize>,
    pub runs: Vec<ShiftRun>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalityReport {
    pub prefix_length: usize,
    pub l_max: usize,
    pub tol: f64,
    pub results: Vec<DefinitionResult>,
}

impl NormalityReport {
    pub fn verdict(&self, d: Definition) -> Option<Verdict> {
        self.results.iter().find(|r| r.definition == d).map(|r| r.verdict)
    }

    /// Whether every definition tested reached the same verdict.
    pub fn agree(&self) -> bool {
        self.results.windows(2).all(|p| p[0].verdict == p[1].verdict)
    }
}

/// Configurable tester. The free functions [`test_aligned`],
/// [`test_strong_aligned`] and [`test_nonaligned`] cover the common case.
#[derive(Clone, Debug)]
pub struct Tester<'a> {
    mu: &'a Measure,
    alphabet: Alphabet,
    spec: Option<&'a ShiftSpec>,
    l_max: usize,
    k_max: usize,
    tol: Option<f64>,
    min_mass: usize,
}

impl<'a> Tester<'a> {
    pub fn new(mu: &'a Measure) -> Self {
        Self {
            mu,
            alphabet: Alphabet::generated(mu.alphabet_size().max(2)),
            spec: None,
            l_max: DEFAULT_L_MAX,
            k_max: DEFAULT_K_MAX,
            tol: None,
            min_mass: DEFAULT_MIN_MASS,
        }
    }

    /// Enumerate blocks of `spec` instead of all words, and render with its alphabet.
    pub fn shift(mut self, spec: &'a ShiftSpec) -> Self {
        self.alphabet = spec.alphabet().clone();
        self.spec = Some(spec);
        self
    }

    pub fn alphabet(mut self, alphabet: Alphabet) -> Self {
        self.alphabet = alphabet;
        self
    }

    pub fn l_max(mut self, l_max: usize) -> Self {
        self.l_max = l_max;
        self
    }

    pub fn k_max(mut self, k_max: usize) -> Self {
        self.k_max = k_max;
        self
    }

    /// `None` selects [`default_tol`] of the prefix length.
    pub fn tol(mut self, tol: Option<f64>) -> Self {
        self.tol = tol;
        self
    }

    pub fn min_mass(mut self, min_mass: usize) -> Self {
        self.min_mass = min_mass;
        self
    }

    pub fn run(&self, x: &[Sym], defs: &[Definition]) -> Result<NormalityReport> {
        if self.l_max == 0 {
            return Err(Error::InvalidArgument("l_max must be at least 1".into()));
        }
        let radix = self.alphabet.len();
        if self.mu.alphabet_size() != radix {
            return Err(Error::AlphabetMismatch(format!(
                "measure has {} symbols, alphabet has {radix}",
                self.mu.alphabet_size()
            )));
        }
        self.alphabet.check_word(x)?;
        let min = self.min_mass * self.l_max;
        let needs_shift = defs.contains(&Definition::Strong);
        let min_total = if needs_shift { min + self.k_max } else { min };
        if x.len() < min_total {
            return Err(Error::PrefixTooShort { len: x.len(), min: min_total });
        }
        let tol = match self.tol {
            Some(t) if t > 0.0 && t.is_finite() => t,
            Some(t) => return Err(Error::InvalidArgument(format!("tolerance must be positive, got {t}"))),
            None => default_tol(x.len()),
        };
        let candidates = self.candidates()?;

        let mut results = Vec::new();
        for &d in defs {
            let shifts: Vec<usize> = match d {
                Definition::Strong => (0..=self.k_max).collect(),
                _ => vec![0],
            };
            let mut runs = Vec::with_capacity(shifts.len());
            for &k in &shifts {
                let y = shift_prefix(x, k)?;
                let levels = (1..=self.l_max)
                    .map(|l| {
                        let step = if d == Definition::Nonaligned { 1 } else { l };
                        self.level(y, l, step, &candidates[l - 1])
                    })
                    .collect();
                runs.push(ShiftRun { shift: k, levels });
            }
            let max_deviation = runs
                .iter()
                .flat_map(|r| &r.levels)
                .map(|l| l.max_deviation)
                .fold(0.0, f64::max);
            let verdict = if max_deviation <= tol { Verdict::Consistent } else { Verdict::Inconsistent };
            results.push(DefinitionResult { definition: d, verdict, max_deviation, shifts_tested: shifts, runs });
        }
        Ok(NormalityReport { prefix_length: x.len(), l_max: self.l_max, tol, results })
    }

    /// Keys of the expected words per length: B_ℓ(X) with a shift, else A^ℓ.
    fn candidates(&self) -> Result<Vec<Vec<u64>>> {
        let radix = self.alphabet.len();
        (1..=self.l_max)
            .map(|l| match self.spec {
                Some(spec) => Ok(spec
                    .blocks_capped(l, DEFAULT_ENUMERATION_CAP)?
                    .words
                    .iter()
                    .map(|w| word_key(w, radix))
                    .collect()),
                None => {
                    checked_word_count(radix, l, DEFAULT_ENUMERATION_CAP)?;
                    let mut keys = Vec::new();
                    for_each_word(radix, l, |w| keys.push(word_key(w, radix)));
                    Ok(keys)
                }
            })
            .collect()
    }

    fn level(&self, y: &[Sym], l: usize, step: usize, expected: &[u64]) -> LevelReport {
        let radix = self.alphabet.len();
        let (counts, windows) = count_windows(y, l, step, radix);
        let mut keys: Vec<u64> = expected.to_vec();
        let known: std::collections::HashSet<u64> = expected.iter().copied().collect();
        let mut extra: Vec<u64> = counts.keys().filter(|k| !known.contains(k)).copied().collect();
        extra.sort_unstable();
        let out_of_shift = if self.spec.is_some() { extra.len() } else { 0 };
        keys.extend(extra);
        keys.sort_unstable();

        let n = windows.max(1) as f64;
        let mut rows = Vec::with_capacity(keys.len());
        let mut estimate_sum = 0.0;
        let mut max_deviation = 0.0f64;
        for key in keys {
            let w = key_word(key, radix, l);
            let estimate = counts.get(&key).copied().unwrap_or(0) as f64 / n;
            let target = self.mu.eval(&w);
            let deviation = (estimate - target).abs();
            estimate_sum += estimate;
            max_deviation = max_deviation.max(deviation);
            rows.push(BlockRow { block: self.alphabet.render(&w), estimate, target, deviation });
        }
        LevelReport { block_length: l, windows, estimate_sum, max_deviation, out_of_shift, rows }
    }
}

/// Counts of length-`l` windows starting at positions `0, step, 2·step, …`
/// that fit in `y`, and the denominator: `⌊|y|/l⌋` for aligned counting,
/// `|y|` for overlapping counting.
fn count_windows(y: &[Sym], l: usize, step: usize, radix: usize) -> (HashMap<u64, u64>, u64) {
    let denom = if step == 1 { y.len() as u64 } else { (y.len() / l) as u64 };
    let mut counts = HashMap::new();
    if y.len() < l {
        return (counts, denom);
    }
    let dense_size = (radix as u64).checked_pow(l as u32).filter(|&s| s <= 1 << 20);
    if let Some(size) = dense_size {
        let mut dense = vec![0u64; size as usize];
        let mut i = 0;
        while i + l <= y.len() {
            dense[word_key(&y[i..i + l], radix) as usize] += 1;
            i += step;
        }
        for (k, c) in dense.into_iter().enumerate() {
            if c > 0 {
                counts.insert(k as u64, c);
            }
        }
    } else {
        let mut i = 0;
        while i + l <= y.len() {
            *counts.entry(word_key(&y[i..i + l], radix)).or_insert(0) += 1;
            i += step;
        }
    }
    (counts, denom)
}

pub fn test_aligned(x: &[Sym], mu: &Measure, l_max: usize, tol: f64) -> Result<NormalityReport> {
    Tester::new(mu).l_max(l_max).tol(Some(tol)).run(x, &[Definition::Aligned])
}

pub fn test_strong_aligned(x: &[Sym], mu: &Measure, l_max: usize, k_max: usize, tol: f64) -> Result<NormalityReport> {
    Tester::new(mu).l_max(l_max).k_max(k_max).tol(Some(tol)).run(x, &[Definition::Strong])
}

pub fn test_nonaligned(x: &[Sym], mu: &Measure, l_max: usize, tol: f64) -> Result<NormalityReport> {
    Tester::new(mu).l_max(l_max).tol(Some(tol)).run(x, &[Definition::Nonaligned])
}
