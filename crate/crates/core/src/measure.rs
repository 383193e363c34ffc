//! Probability measures on finite words and their entropies.
//!
//! All logarithms are base 2. Invariance and compatibility checks are
//! bounded: they certify the property only for the word lengths tested.

use serde::{Deserialize, Serialize};

use crate::alphabet::{checked_word_count, for_each_word, Sym};
use crate::error::{Error, Result};
use crate::shift::{ShiftSpec, DEFAULT_ENUMERATION_CAP};
use crate::spectral::{self, PerronData};

const SUM_TOL: f64 = 1e-12;
const STOCHASTIC_TOL: f64 = 1e-9;

/// A measure on `A*`, evaluated on cylinders.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Measure {
    /// Product measure of per-symbol weights.
    Bernoulli { weights: Vec<f64> },
    /// `μ(a1…ak) = π_a1 P_a1a2 ⋯ P_a(k-1)ak`.
    Markov {
        pi: Vec<f64>,
        #[serde(rename = "P")]
        p: Vec<Vec<f64>>,
    },
    /// `ν(a1…ak) = (1/m) P_a1a2 ⋯`: uniform first symbol regardless of any
    /// stationary vector, so generally not shift invariant.
    Empirical {
        m: usize,
        #[serde(rename = "P")]
        p: Vec<Vec<f64>>,
    },
}

pub fn bernoulli(weights: Vec<f64>) -> Result<Measure> {
    check_distribution(&weights, "weights")?;
    Ok(Measure::Bernoulli { weights })
}

/// Markov measure from an initial distribution and a stochastic matrix.
///
/// A non-stationary `pi` is accepted with a warning: the resulting measure is
/// then additive but not shift invariant.
pub fn markov(pi: Vec<f64>, p: Vec<Vec<f64>>) -> Result<Measure> {
    check_distribution(&pi, "pi")?;
    check_stochastic(&p, pi.len())?;
    if !is_stationary(&pi, &p, 1e-10) {
        log::warn!("pi is not stationary for P; the Markov measure is not invariant");
    }
    Ok(Measure::Markov { pi, p })
}

pub fn empirical(m: usize, p: Vec<Vec<f64>>) -> Result<Measure> {
    check_stochastic(&p, m)?;
    Ok(Measure::Empirical { m, p })
}

fn check_distribution(v: &[f64], what: &str) -> Result<()> {
    if v.is_empty() {
        return Err(Error::InvalidMeasure(format!("{what} is empty")));
    }
    if v.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
        return Err(Error::InvalidMeasure(format!("{what} has entries outside [0,1]")));
    }
    let s: f64 = v.iter().sum();
    if (s - 1.0).abs() > SUM_TOL {
        return Err(Error::InvalidMeasure(format!("{what} sums to {s}, not 1")));
    }
    Ok(())
}

fn check_stochastic(p: &[Vec<f64>], n: usize) -> Result<()> {
    if p.len() != n || p.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidMeasure(format!("matrix is not {n}x{n}")));
    }
    for (i, row) in p.iter().enumerate() {
        if row.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
            return Err(Error::InvalidMeasure(format!("row {i} has entries outside [0,1]")));
        }
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::InvalidMeasure(format!("row {i} sums to {s}")));
        }
    }
    Ok(())
}

/// `|πP − π|∞ ≤ tol`.
pub fn is_stationary(pi: &[f64], p: &[Vec<f64>], tol: f64) -> bool {
    (0..pi.len()).all(|j| {
        let v: f64 = (0..pi.len()).map(|i| pi[i] * p[i][j]).sum();
        (v - pi[j]).abs() <= tol
    })
}

impl Measure {
    /// Parses and validates a measure file.
    pub fn from_json(s: &str) -> Result<Measure> {
        let m: Measure = serde_json::from_str(s)?;
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Measure::Bernoulli { weights } => check_distribution(weights, "weights"),
            Measure::Markov { pi, p } => {
                check_distribution(pi, "pi")?;
                check_stochastic(p, pi.len())
            }
            Measure::Empirical { m, p } => {
                if *m == 0 {
                    return Err(Error::InvalidMeasure("empty alphabet".into()));
                }
                check_stochastic(p, *m)
            }
        }
    }

    pub fn alphabet_size(&self) -> usize {
        match self {
            Measure::Bernoulli { weights } => weights.len(),
            Measure::Markov { pi, .. } => pi.len(),
            Measure::Empirical { m, .. } => *m,
        }
    }

    /// Measure of the cylinder `w`; `μ(ε) = 1`. Symbols outside the
    /// alphabet get measure zero.
    pub fn eval(&self, w: &[Sym]) -> f64 {
        let n = self.alphabet_size();
        if w.iter().any(|&s| s as usize >= n) {
            return 0.0;
        }
        let Some((&first, _)) = w.split_first() else {
            return 1.0;
        };
        match self {
            Measure::Bernoulli { weights } => w.iter().map(|&s| weights[s as usize]).product(),
            Measure::Markov { pi, p } => {
                pi[first as usize] * w.windows(2).map(|t| p[t[0] as usize][t[1] as usize]).product::<f64>()
            }
            Measure::Empirical { m, p } => {
                w.windows(2).map(|t| p[t[0] as usize][t[1] as usize]).product::<f64>() / *m as f64
            }
        }
    }

    /// `μ(wa) / μ(w)` style transition weight, used by enumerations that
    /// extend words one symbol at a time.
    fn step(&self, last: Option<Sym>, next: Sym) -> f64 {
        let n = next as usize;
        match (self, last) {
            (Measure::Bernoulli { weights }, _) => weights[n],
            (Measure::Markov { pi, .. }, None) => pi[n],
            (Measure::Empirical { m, .. }, None) => 1.0 / *m as f64,
            (Measure::Markov { p, .. } | Measure::Empirical { p, .. }, Some(l)) => p[l as usize][n],
        }
    }

    /// Visits every word of length `len` with its measure, pruning zero branches.
    pub fn for_each_positive(&self, len: usize, mut f: impl FnMut(&[Sym], f64)) {
        let mut w = Vec::with_capacity(len);
        self.walk(&mut w, 1.0, len, &mut f);
    }

    fn walk(&self, w: &mut Vec<Sym>, mass: f64, len: usize, f: &mut impl FnMut(&[Sym], f64)) {
        if w.len() == len {
            f(w, mass);
            return;
        }
        for a in 0..self.alphabet_size() as Sym {
            let m = mass * self.step(w.last().copied(), a);
            if m > 0.0 {
                w.push(a);
                self.walk(w, m, len, f);
                w.pop();
            }
        }
    }
}

/// The Parry measure of an irreducible shift of finite type.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParryMeasure {
    pub lambda: f64,
    pub pi: Vec<f64>,
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
    pub perron: PerronData,
}

impl ParryMeasure {
    pub fn measure(&self) -> Measure {
        Measure::Markov { pi: self.pi.clone(), p: self.p.clone() }
    }

    pub fn entropy(&self) -> f64 {
        markov_entropy(&self.pi, &self.p)
    }
}

/// `P_ij = M_ij r_j / (λ r_i)`, `π_i = l_i r_i`.
pub fn parry(spec: &ShiftSpec) -> Result<ParryMeasure> {
    let perron = spectral::perron(spec, spectral::DEFAULT_TOL)?;
    let k = spec.size();
    let lambda = perron.lambda;
    let r = &perron.right;
    let p = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    if spec.allowed(i as Sym, j as Sym) {
                        r[j] / (lambda * r[i])
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    Ok(ParryMeasure { lambda, pi: perron.pi(), p, perron })
}

/// Checks `Σ_a μ(aw) = μ(w)` for all `|w| ≤ max_len` within `tol`.
pub fn is_invariant(mu: &Measure, spec: &ShiftSpec, max_len: usize, tol: f64) -> Result<bool> {
    let k = spec.size();
    for len in 0..=max_len {
        checked_word_count(k, len + 1, DEFAULT_ENUMERATION_CAP)?;
        let mut ok = true;
        let mut aw = vec![0; len + 1];
        for_each_word(k, len, |w| {
            if !ok {
                return;
            }
            aw[1..].copy_from_slice(w);
            let mut s = 0.0;
            for a in 0..k as Sym {
                aw[0] = a;
                s += mu.eval(&aw);
            }
            if (s - mu.eval(w)).abs() > tol {
                ok = false;
            }
        });
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks additivity `Σ_a μ(wa) = μ(w)` for all `|w| ≤ max_len`.
pub fn is_additive(mu: &Measure, spec: &ShiftSpec, max_len: usize, tol: f64) -> Result<bool> {
    let k = spec.size();
    for len in 0..=max_len {
        checked_word_count(k, len + 1, DEFAULT_ENUMERATION_CAP)?;
        let mut ok = true;
        let mut wa = vec![0; len + 1];
        for_each_word(k, len, |w| {
            if !ok {
                return;
            }
            wa[..len].copy_from_slice(w);
            let mut s = 0.0;
            for a in 0..k as Sym {
                wa[len] = a;
                s += mu.eval(&wa);
            }
            if (s - mu.eval(w)).abs() > tol {
                ok = false;
            }
        });
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff `μ(w) > 0` implies `w` is a block, for every `|w| ≤ max_len`.
pub fn is_compatible(mu: &Measure, spec: &ShiftSpec, max_len: usize) -> Result<bool> {
    if mu.alphabet_size() != spec.size() {
        return Err(Error::InvalidMeasure("alphabet size differs from the shift".into()));
    }
    let mut ok = true;
    for len in 1..=max_len {
        checked_word_count(spec.size(), len, DEFAULT_ENUMERATION_CAP)?;
        mu.for_each_positive(len, |w, _| {
            if spec.first_violation(w).is_some() {
                ok = false;
            }
        });
        if !ok {
            break;
        }
    }
    Ok(ok)
}

/// `φ(p) = −p log2 p` with `φ(0) = 0`.
#[inline]
pub fn phi(p: f64) -> f64 {
    if p == 0.0 || p == 1.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

/// `h(μ_{π,P}) = −Σ π_i P_ij log2 P_ij`.
pub fn markov_entropy(pi: &[f64], p: &[Vec<f64>]) -> f64 {
    pi.iter()
        .zip(p)
        .map(|(&pi_i, row)| pi_i * row.iter().map(|&x| phi(x)).sum::<f64>())
        .sum()
}

/// `−(1/n) Σ_{w ∈ A^n} μ(w) log2 μ(w)`, the n-th term of the entropy limit.
pub fn measure_entropy_truncated(mu: &Measure, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("length must be at least 1".into()));
    }
    checked_word_count(mu.alphabet_size(), n, DEFAULT_ENUMERATION_CAP)?;
    let mut s = 0.0;
    mu.for_each_positive(n, |_, m| s += phi(m));
    Ok(s / n as f64)
}
