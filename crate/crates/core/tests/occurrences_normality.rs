mod common;

use common::{all_words, irreducible_spec, naive_positions};
use proptest::prelude::*;
use sftnorm::alphabet::Sym;
use sftnorm::measure::parry;
use sftnorm::normality::{Definition, Tester, Verdict};
use sftnorm::occurrences::{alocc, block_entropy, occ, relative_frequency, OccurrenceTable};
use sftnorm::sampling::{sample_parry, sample_skewed};
use sftnorm::shift::{shift_prefix, ShiftSpec};

#[test]
fn occ_is_sum_of_aligned_classes_exhaustive() {
    for n in 0..=12 {
        for w in all_words(2, n) {
            for l in 1..=4 {
                for u in all_words(2, l) {
                    let total: usize = (1..=l).map(|r| alocc(&w, &u, r).unwrap()).sum();
                    assert_eq!(occ(&w, &u), total);
                }
            }
        }
    }
}

#[test]
fn occ_decomposes_over_shifted_prefixes() {
    for n in 0..=11 {
        for x in all_words(2, n) {
            for l in 1..=3 {
                for w in all_words(2, l) {
                    let mut total = 0;
                    for i in 0..l.min(n + 1) {
                        let shifted = shift_prefix(&x, i).unwrap();
                        total += alocc(shifted, &w, 1).unwrap();
                    }
                    assert_eq!(occ(&x, &w), total, "x={x:?} w={w:?}");
                    let counted: usize = naive_positions(&x, &w).len();
                    assert_eq!(occ(&x, &w), counted);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn multiples_of_k_bound(
        x in proptest::collection::vec(0u32..2, 1..400),
        l in 1usize..4,
        k in 1usize..6,
        w_key in 0u64..8,
    ) {
        let w: Vec<Sym> = (0..l).rev().map(|i| ((w_key >> i) & 1) as Sym).collect();
        let blocks = x.len() / l;
        for m in k..=blocks {
            let nk = m / k * k;
            let a_m = alocc(&x[..m * l], &w, 1).unwrap() as f64 / m as f64;
            let a_nk = alocc(&x[..nk * l], &w, 1).unwrap() as f64 / nk as f64;
            prop_assert!((a_m - a_nk).abs() <= k as f64 / m as f64 + 1e-12);
        }
    }

    #[test]
    fn block_entropy_depends_only_on_block_counts(
        x in proptest::collection::vec(0u32..3, 1..40),
        l in 1usize..4,
        seed in any::<u64>(),
    ) {
        let k = x.len() / l;
        prop_assume!(k >= 1);
        let u = &x[..k * l];
        let mut blocks: Vec<&[Sym]> = u.chunks(l).collect();
        // deterministic shuffle driven by the seed
        let mut s = seed | 1;
        for i in (1..blocks.len()).rev() {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            blocks.swap(i, (s % (i as u64 + 1)) as usize);
        }
        let permuted: Vec<Sym> = blocks.concat();
        let a = block_entropy(u, l).unwrap();
        let b = block_entropy(&permuted, l).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn relative_frequencies_sum_to_one(x in proptest::collection::vec(0u32..2, 1..200), l in 1usize..5) {
        let k = x.len() / l;
        prop_assume!(k >= 1);
        let u = &x[..k * l];
        let s: f64 = all_words(2, l).iter().map(|w| relative_frequency(u, w).unwrap()).sum();
        prop_assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn table_agrees_with_direct_counts(x in proptest::collection::vec(0u32..3, 0..200), l in 1usize..4) {
        let t = OccurrenceTable::build(&x, l, 3).unwrap();
        for u in all_words(3, l) {
            prop_assert_eq!(t.occ(&u) as usize, occ(&x, &u));
            for r in 1..=l {
                prop_assert_eq!(t.alocc(&u, r) as usize, alocc(&x, &u, r).unwrap());
            }
        }
    }

    #[test]
    fn parry_samples_are_blocks(spec in irreducible_spec(5), n in 1usize..3000, seed in any::<u64>()) {
        let x = sample_parry(&spec, n, seed).unwrap();
        prop_assert_eq!(x.len(), n);
        prop_assert!(spec.is_block(&x).unwrap());
    }

    #[test]
    fn lower_bounds_follow_from_upper_bounds(
        x in proptest::collection::vec(0u32..2, 800..3000),
        tol in 0.001f64..0.2,
    ) {
        let mu = parry(&common::full2()).unwrap().measure();
        let spec = common::full2();
        let report = Tester::new(&mu).shift(&spec).l_max(3).k_max(2).tol(Some(tol)).min_mass(1).run(&x, &Definition::ALL).unwrap();
        for d in &report.results {
            for run in &d.runs {
                for level in &run.levels {
                    prop_assert!(level.lower_bound_follows(tol, 2));
                }
            }
        }
    }
}

#[test]
fn verdicts_agree_on_small_corpus() {
    let gm = ShiftSpec::golden_mean();
    let mu = parry(&gm).unwrap().measure();
    let normal = sample_parry(&gm, 200_000, 5).unwrap();
    let periodic: Vec<Sym> = (0..200_000).map(|i| (i % 2) as Sym).collect();
    let skewed = sample_skewed(&gm, &[vec![0.9, 0.1], vec![1.0, 0.0]], 200_000, 5).unwrap();
    let period3: Vec<Sym> = (0..200_000).map(|i| (i % 3 == 0) as Sym).collect();
    let cases = [(normal, Verdict::Consistent), (periodic, Verdict::Inconsistent), (skewed, Verdict::Inconsistent), (period3, Verdict::Inconsistent)];
    for (x, expected) in cases {
        let r = Tester::new(&mu).shift(&gm).l_max(3).k_max(4).run(&x, &Definition::ALL).unwrap();
        assert!(r.agree());
        for d in Definition::ALL {
            assert_eq!(r.verdict(d), Some(expected));
        }
    }
}
