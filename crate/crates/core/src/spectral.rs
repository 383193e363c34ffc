//! Perron-Frobenius data of nonnegative 0/1 matrices by power iteration.
//!
//! Iteration starts from the all-ones vector, which is never orthogonal to a
//! Perron vector of an irreducible nonnegative matrix. When the eigenvalue
//! estimate keeps alternating (periodic matrices have several eigenvalues on
//! the spectral circle) the iteration restarts on `M + I`, which has the same
//! eigenvectors and Perron eigenvalue `λ + 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shift::ShiftSpec;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;

/// Consecutive alternating, non-shrinking estimate differences that count as
/// oscillation.
const OSCILLATION_WINDOW: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerronData {
    pub lambda: f64,
    /// Left eigenvector, `l M = λ l`.
    pub left: Vec<f64>,
    /// Right eigenvector, `M r = λ r`.
    pub right: Vec<f64>,
    /// `max(|M r − λ r|∞ / |r|∞, |l M − λ l|∞ / |l|∞)` after normalization.
    pub residual: f64,
    pub iterations: usize,
    /// Whether the `M + I` fallback was used.
    pub shifted: bool,
}

impl PerronData {
    /// `π_i = l_i r_i`.
    pub fn pi(&self) -> Vec<f64> {
        self.left.iter().zip(&self.right).map(|(l, r)| l * r).collect()
    }
}

pub fn perron(spec: &ShiftSpec, tol: f64) -> Result<PerronData> {
    perron_with(spec, tol, DEFAULT_MAX_ITER)
}

pub fn perron_with(spec: &ShiftSpec, tol: f64, max_iter: usize) -> Result<PerronData> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if !spec.is_irreducible() {
        return Err(Error::NotIrreducible);
    }
    let m = dense(spec);
    let mt = transpose(&m);

    let attempt = |shift: f64| -> Option<(f64, Vec<f64>, Vec<f64>, usize)> {
        let (lr, r, ir) = iterate(&m, shift, tol, max_iter)?;
        let (ll, l, il) = iterate(&mt, shift, tol, max_iter)?;
        Some((0.5 * (lr + ll) - shift, l, r, ir + il))
    };

    let (lambda, mut left, mut right, iterations, shifted) = match attempt(0.0) {
        Some((lambda, l, r, it)) => (lambda, l, r, it, false),
        None => match attempt(1.0) {
            Some((lambda, l, r, it)) => (lambda, l, r, it, true),
            None => {
                return Err(Error::NoConvergence { residual: f64::NAN });
            }
        },
    };

    // r sums to 1, then scale l so that Σ l_i r_i = 1.
    let rs: f64 = right.iter().sum();
    right.iter_mut().for_each(|v| *v /= rs);
    let dot: f64 = left.iter().zip(&right).map(|(a, b)| a * b).sum();
    left.iter_mut().for_each(|v| *v /= dot);

    let residual = rel_residual(&m, &right, lambda).max(rel_residual(&mt, &left, lambda));
    if residual >= tol.max(4.0 * roundoff_floor(m.len(), 1.0)) {
        return Err(Error::NoConvergence { residual });
    }
    Ok(PerronData { lambda, left, right, residual, iterations, shifted })
}

fn dense(spec: &ShiftSpec) -> Vec<Vec<f64>> {
    spec.matrix_u8()
        .into_iter()
        .map(|r| r.into_iter().map(f64::from).collect())
        .collect()
}

fn transpose(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    (0..n).map(|j| (0..n).map(|i| m[i][j]).collect()).collect()
}

fn mul(m: &[Vec<f64>], v: &[f64], shift: f64) -> Vec<f64> {
    m.iter()
        .zip(v)
        .map(|(row, vi)| row.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() + shift * vi)
        .collect()
}

fn abs_residual(m: &[Vec<f64>], v: &[f64], lambda: f64) -> f64 {
    mul(m, v, 0.0)
        .iter()
        .zip(v)
        .map(|(mv, vi)| (mv - lambda * vi).abs())
        .fold(0.0, f64::max)
}

/// Smallest relative residual power iteration can be asked for on an `n × n` 0/1 matrix.
/// Tolerances below it are clamped.
fn roundoff_floor(n: usize, shift: f64) -> f64 {
    64.0 * f64::EPSILON * n as f64 * (n as f64 + shift)
}

fn rel_residual(m: &[Vec<f64>], v: &[f64], lambda: f64) -> f64 {
    let scale = v.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    abs_residual(m, v, lambda) / scale.max(f64::MIN_POSITIVE)
}

/// Power iteration on `m + shift·I`. Returns `None` on oscillation or when
/// the iteration cap is hit.
fn iterate(m: &[Vec<f64>], shift: f64, tol: f64, max_iter: usize) -> Option<(f64, Vec<f64>, usize)> {
    let n = m.len();
    // Stop well inside the requested tolerance, down to the roundoff floor.
    let target = (tol * 1e-2).max(roundoff_floor(n, shift));
    let mut v = vec![1.0 / n as f64; n];
    let mut prev = f64::NAN;
    let mut prev_diff = 0.0f64;
    let mut alternating = 0usize;
    for it in 1..=max_iter {
        let w = mul(m, &v, shift);
        let norm: f64 = w.iter().sum();
        let est = norm; // v sums to 1
        let next: Vec<f64> = w.iter().map(|x| x / norm).collect();
        let diff = est - prev;
        if diff.abs() < target {
            let lambda = est - shift;
            if rel_residual(m, &next, lambda) < target {
                return Some((est, next, it));
            }
        }
        if prev_diff != 0.0 && diff.signum() != prev_diff.signum() && diff.abs() >= 0.5 * prev_diff.abs() {
            alternating += 1;
            if alternating >= OSCILLATION_WINDOW {
                return None;
            }
        } else {
            alternating = 0;
        }
        prev_diff = diff;
        prev = est;
        v = next;
    }
    None
}
