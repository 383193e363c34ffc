#![allow(dead_code)]

use std::path::PathBuf;

use proptest::prelude::*;
use sftnorm::alphabet::{Alphabet, Sym};
use sftnorm::shift::ShiftSpec;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

pub fn full2() -> ShiftSpec {
    ShiftSpec::full(Alphabet::binary()).unwrap()
}

/// Naive scanner: positions `i` (1-based) with `w[i..i+|u|) = u`.
pub fn naive_positions(w: &[Sym], u: &[Sym]) -> Vec<usize> {
    if u.is_empty() || u.len() > w.len() {
        return Vec::new();
    }
    (0..=w.len() - u.len()).filter(|&i| &w[i..i + u.len()] == u).map(|i| i + 1).collect()
}

/// Every word of length `len` over `radix` symbols.
pub fn all_words(radix: usize, len: usize) -> Vec<Vec<Sym>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..radix as Sym).map(move |s| {
                    let mut v = w.clone();
                    v.push(s);
                    v
                })
            })
            .collect();
    }
    out
}

pub fn matrix_spec(rows: &[Vec<u8>]) -> ShiftSpec {
    ShiftSpec::from_matrix(Alphabet::generated(rows.len()), rows).unwrap()
}

fn matrix(n: usize) -> impl Strategy<Value = Vec<Vec<u8>>> {
    proptest::collection::vec(proptest::collection::vec(0u8..=1, n), n)
}

/// Random irreducible specs with 2 to `max` symbols.
pub fn irreducible_spec(max: usize) -> impl Strategy<Value = ShiftSpec> {
    (2..=max).prop_flat_map(matrix).prop_filter_map("reducible", |m| {
        let spec = matrix_spec(&m);
        spec.is_irreducible().then_some(spec)
    })
}

/// Random irreducible aperiodic specs with 2 to `max` symbols.
pub fn mixing_spec(max: usize) -> impl Strategy<Value = ShiftSpec> {
    irreducible_spec(max).prop_filter("periodic", |s| s.is_aperiodic().unwrap())
}
