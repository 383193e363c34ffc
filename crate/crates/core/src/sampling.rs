//! Seeded Markov-chain samplers over shifts of finite type.
//!
//! The generator is xoshiro256++ seeded through SplitMix64 (the `rand_xoshiro`
//! `seed_from_u64` expansion). Each draw takes one `next_u64`, keeps the top
//! 53 bits as a uniform `u ∈ [0,1)`, and picks the first index whose
//! cumulative weight exceeds `u`. Samples are bit-exact given (algorithm, seed).

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::alphabet::Sym;
use crate::error::{Error, Result};
use crate::measure::{is_stationary, parry};
use crate::shift::ShiftSpec;

/// Identifier recorded in reports.
pub const PRNG_ID: &str = "xoshiro256++/splitmix64-seed/top53-inverse-cdf";

struct Sampler {
    rng: Xoshiro256PlusPlus,
}

impl Sampler {
    fn new(seed: u64) -> Self {
        Self { rng: Xoshiro256PlusPlus::seed_from_u64(seed) }
    }

    fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Index drawn from `weights` (nonnegative, summing to ~1).
    fn pick(&mut self, cumulative: &[f64]) -> Sym {
        let u = self.uniform() * cumulative[cumulative.len() - 1];
        match cumulative.iter().position(|&c| u < c) {
            Some(i) => i as Sym,
            // u can only reach the total through rounding; take the last positive weight
            None => last_positive(cumulative),
        }
    }
}

fn last_positive(cumulative: &[f64]) -> Sym {
    let mut last = 0;
    for i in 0..cumulative.len() {
        let prev = if i == 0 { 0.0 } else { cumulative[i - 1] };
        if cumulative[i] > prev {
            last = i;
        }
    }
    last as Sym
}

fn cumulative(v: &[f64]) -> Vec<f64> {
    v.iter()
        .scan(0.0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

fn sample_chain(pi: &[f64], p: &[Vec<f64>], n: usize, seed: u64) -> Vec<Sym> {
    let mut s = Sampler::new(seed);
    let pi_c = cumulative(pi);
    let rows: Vec<Vec<f64>> = p.iter().map(|r| cumulative(r)).collect();
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    let mut cur = s.pick(&pi_c);
    out.push(cur);
    for _ in 1..n {
        cur = s.pick(&rows[cur as usize]);
        out.push(cur);
    }
    out
}

/// A length-`n` sample of the Parry chain: first symbol from `π`, then rows of `P`.
pub fn sample_parry(spec: &ShiftSpec, n: usize, seed: u64) -> Result<Vec<Sym>> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample length must be at least 1".into()));
    }
    let pm = parry(spec)?;
    Ok(sample_chain(&pm.pi, &pm.p, n, seed))
}

/// A Markov sample driven by a compatible, irreducible stochastic matrix `q`.
/// The first symbol comes from the stationary distribution of `q`.
pub fn sample_skewed(spec: &ShiftSpec, q: &[Vec<f64>], n: usize, seed: u64) -> Result<Vec<Sym>> {
    let k = spec.size();
    if n == 0 {
        return Err(Error::InvalidArgument("sample length must be at least 1".into()));
    }
    if q.len() != k || q.iter().any(|r| r.len() != k) {
        return Err(Error::InvalidMeasure(format!("Q must be {k}x{k}")));
    }
    for (i, row) in q.iter().enumerate() {
        if row.iter().any(|&v| !(0.0..=1.0).contains(&v)) || (row.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidMeasure(format!("row {i} of Q is not stochastic")));
        }
        for (j, &v) in row.iter().enumerate() {
            if v > 0.0 && !spec.allowed(i as Sym, j as Sym) {
                return Err(Error::InvalidMeasure(format!(
                    "Q puts weight on forbidden pair {}",
                    spec.alphabet().render(&[i as Sym, j as Sym])
                )));
            }
        }
    }
    let support = ShiftSpec::from_matrix(
        spec.alphabet().clone(),
        &q.iter().map(|r| r.iter().map(|&v| (v > 0.0) as u8).collect()).collect::<Vec<_>>(),
    )?;
    if !support.is_irreducible() {
        return Err(Error::InvalidMeasure("Q is not irreducible".into()));
    }
    let pi = stationary(q);
    debug_assert!(is_stationary(&pi, q, 1e-8));
    Ok(sample_chain(&pi, q, n, seed))
}

/// Stationary distribution of an irreducible stochastic matrix by
/// iterating the lazy chain `(I + Q)/2`.
pub fn stationary(q: &[Vec<f64>]) -> Vec<f64> {
    let k = q.len();
    let mut pi = vec![1.0 / k as f64; k];
    for _ in 0..1_000_000 {
        let mut next = vec![0.0; k];
        for i in 0..k {
            for j in 0..k {
                next[j] += pi[i] * q[i][j];
            }
        }
        let next: Vec<f64> = next.iter().zip(&pi).map(|(a, b)| 0.5 * (a + b)).collect();
        let diff = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        pi = next;
        if diff < 1e-15 {
            break;
        }
    }
    let s: f64 = pi.iter().sum();
    pi.iter().map(|v| v / s).collect()
}
