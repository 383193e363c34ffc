mod common;

use common::{all_words, full2, irreducible_spec, mixing_spec};
use proptest::prelude::*;
use sftnorm::alphabet::Sym;
use sftnorm::compressor::{
    check_block_entropy_bound, compress_nonnormal, compression_ratio, read_bits, write_bits, BlockCode,
    EmpiricalChain, Recoder,
};
use sftnorm::sampling::{sample_parry, sample_skewed};
use sftnorm::shift::ShiftSpec;
use sftnorm::transducer::{check_injective_blocks, check_kraft_bound, compose, run};

fn chain_input() -> impl Strategy<Value = (usize, usize, Vec<Sym>)> {
    (1usize..=5).prop_flat_map(|m| {
        let max_k: usize = if m <= 3 { 6 } else if m == 4 { 5 } else { 4 };
        (Just(m), 1..=max_k, proptest::collection::vec(0..m as Sym, 2..300))
    })
}

fn assert_prefix_free(words: &[Vec<Sym>]) {
    let mut sorted: Vec<&Vec<Sym>> = words.iter().collect();
    sorted.sort();
    for pair in sorted.windows(2) {
        assert!(!pair[1].starts_with(pair[0]), "{:?} is a prefix of {:?}", pair[0], pair[1]);
    }
}

/// Small block-code compressors over a few shifts and sequence kinds.
fn built_compressors() -> Vec<(String, ShiftSpec, Vec<Sym>, usize, usize)> {
    let gm = ShiftSpec::golden_mean();
    let three = common::matrix_spec(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]);
    let periodic: Vec<Sym> = (0..5000).map(|i| (i % 2) as Sym).collect();
    vec![
        ("gm periodic l1 k4".into(), gm.clone(), periodic.clone(), 1, 4),
        ("gm periodic l2 k3".into(), gm.clone(), periodic, 2, 3),
        ("gm parry l1 k4".into(), gm.clone(), sample_parry(&gm, 5000, 3).unwrap(), 1, 4),
        (
            "gm skewed l1 k5".into(),
            gm.clone(),
            sample_skewed(&gm, &[vec![0.9, 0.1], vec![1.0, 0.0]], 5000, 3).unwrap(),
            1,
            5,
        ),
        ("full2 parry l2 k2".into(), full2(), sample_parry(&full2(), 5000, 4).unwrap(), 2, 2),
        ("three-cycle l1 k3".into(), three.clone(), sample_parry(&three, 5000, 5).unwrap(), 1, 3),
    ]
}

#[test]
fn built_compressors_are_injective_and_roundtrip() {
    for (name, spec, x, l, k) in built_compressors() {
        let c = compress_nonnormal(&spec, &x, l, k, 20).unwrap();
        let b = c.block_length();
        assert_eq!(b, l * k);
        let inj = check_injective_blocks(&c.transducer, 2 * b).unwrap();
        assert!(inj.injective, "{name}: {:?}", inj.witness);

        // a thousand random inputs of up to three code blocks
        for seed in 0..1000u64 {
            let blocks = 1 + (seed % 3) as usize;
            let u = sample_parry(&spec, blocks * b, seed).unwrap();
            let bits = c.encode(&u).unwrap();
            assert_eq!(run(&c.transducer, &u).unwrap().output, bits, "{name}");
            assert_eq!(c.decode(&bits).unwrap(), u, "{name}");
        }
    }
}

#[test]
fn built_compressors_satisfy_kraft_and_block_entropy_bound() {
    for (name, spec, x, l, k) in built_compressors() {
        let c = compress_nonnormal(&spec, &x, l, k, 20).unwrap();
        let b = c.block_length();
        for len in [b, 8] {
            let audit = check_kraft_bound(&c.transducer, len, 1).unwrap();
            assert!(audit.holds, "{name} at {len}: {audit:?}");
        }
        let whole = x.len() / b * b;
        let bound = check_block_entropy_bound(&c.transducer, &x[..whole], b, 1).unwrap();
        assert!(bound.holds, "{name}: {bound:?}");
    }
}

#[test]
fn recoder_outputs_are_target_blocks_and_meet_the_bound() {
    let gm = ShiftSpec::golden_mean();
    let target = full2();
    let r = Recoder::build(&gm, &target, 0.2).unwrap();
    let p = r.params().clone();
    let bound = p.h_source / p.h_target + p.epsilon;

    let x = sample_parry(&gm, 100_000, 11).unwrap();
    let enc = r.encode(&x).unwrap();
    let ratio = enc.output.len() as f64 / x.len() as f64;
    assert!(ratio <= bound + 0.01, "{ratio} > {bound}");
    assert!(target.is_block(&enc.output).unwrap());
    assert_eq!(r.decode(&enc.output).unwrap(), x[..enc.blocks * p.input_block].to_vec());

    // seams between consecutive output blocks, checked block by block
    let y = sample_parry(&gm, 10_000 * p.input_block, 12).unwrap();
    let enc = r.encode(&y).unwrap();
    assert_eq!(enc.blocks, 10_000);
    for pair in enc.output.chunks_exact(2 * p.output_block) {
        assert!(target.is_block(pair).unwrap());
    }
}

#[test]
fn recoder_into_golden_mean_keeps_seams_valid() {
    let gm = ShiftSpec::golden_mean();
    let r = Recoder::build(&full2(), &gm, 0.6).unwrap();
    let x: Vec<Sym> = sample_parry(&full2(), 20_000, 2).unwrap();
    let enc = r.encode(&x).unwrap();
    assert!(gm.is_block(&enc.output).unwrap());
    assert_eq!(r.decode(&enc.output).unwrap(), x[..enc.blocks * r.params().input_block].to_vec());
}

#[test]
fn composed_recoder_matches_piping() {
    let gm = ShiftSpec::golden_mean();
    let seq = sample_skewed(&gm, &[vec![0.8, 0.2], vec![1.0, 0.0]], 4000, 9).unwrap();
    let kraft = compress_nonnormal(&gm, &seq, 1, 3, 10).unwrap();
    let recoder = Recoder::build(&full2(), &gm, 0.6).unwrap();
    let rt = recoder.to_transducer(1 << 16).unwrap();
    let composed = compose(&rt, &kraft.transducer).unwrap();
    for seed in 0..1000u64 {
        let x = sample_parry(&gm, 1 + (seed as usize * 7) % 90, seed).unwrap();
        let bits = run(&kraft.transducer, &x).unwrap().output;
        let piped = run(&rt, &bits).unwrap().output;
        assert_eq!(run(&composed, &x).unwrap().output, piped, "seed {seed}");
        let whole = bits.len() / recoder.params().input_block * recoder.params().input_block;
        assert_eq!(piped, recoder.encode(&bits[..whole]).unwrap().output);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn block_code_roundtrips_exhaustively((m, k, y) in chain_input()) {
        let chain = EmpiricalChain::from_sequence(&y, m).unwrap();
        let code = BlockCode::build(&chain, k).unwrap();
        let words = all_words(m, k);
        let codes: Vec<Vec<Sym>> = words.iter().map(|u| code.codeword(u).unwrap().to_vec()).collect();
        for (u, c) in words.iter().zip(&codes) {
            prop_assert_eq!(&code.decode(c).unwrap(), u);
        }
        assert_prefix_free(&codes);
        let (num, log2_den) = code.kraft_sum_t();
        prop_assert!(num <= num_bigint::BigUint::from(1u8) << log2_den as usize);
        prop_assert_eq!(code.s_count() + code.t_count(), words.len());

        let whole = y.len() / k * k;
        let (bits, dropped) = code.encode(&y).unwrap();
        prop_assert_eq!(dropped, y.len() - whole);
        prop_assert_eq!(code.decode(&bits).unwrap(), y[..whole].to_vec());
    }

    #[test]
    fn bitstream_roundtrip(bits in proptest::collection::vec(0u32..2, 0..500)) {
        let bytes = write_bits(&bits).unwrap();
        prop_assert_eq!(bytes.len(), 8 + bits.len().div_ceil(8));
        prop_assert_eq!(read_bits(&bytes).unwrap(), bits);
    }

    #[test]
    fn ratio_reports_are_monotone(
        spec in mixing_spec(3),
        n in 50usize..2000,
        samples in 1usize..60,
        seed in any::<u64>(),
    ) {
        let x = sample_parry(&spec, n, seed).unwrap();
        let c = compress_nonnormal(&spec, &x, 1, 3, samples).unwrap();
        let r = &c.report;
        prop_assert_eq!(r.samples.len(), samples.min(n));
        prop_assert_eq!(r.samples.last().unwrap().prefix_length, n);
        for s in &r.samples {
            prop_assert!(s.ratio >= 0.0);
        }
        for w in r.samples.windows(2) {
            prop_assert!(w[0].prefix_length < w[1].prefix_length);
            prop_assert!(w[0].output_length <= w[1].output_length);
        }
        prop_assert!(r.liminf_estimate <= r.limsup_estimate);
        prop_assert_eq!(r.dropped_symbols, n % 3);
        let whole = n / 3 * 3;
        prop_assert_eq!(r.samples.last().unwrap().output_length, c.encode(&x[..whole]).unwrap().len() as u64);
    }

    #[test]
    fn ratio_of_identity_is_one(spec in irreducible_spec(4), n in 1usize..500, seed in any::<u64>()) {
        let x = sample_parry(&spec, n, seed).unwrap();
        let id = sftnorm::transducer::Transducer::identity(spec.alphabet().clone());
        let r = compression_ratio(&id, &x, 10).unwrap();
        for s in &r.samples {
            prop_assert_eq!(s.output_length, s.prefix_length as u64);
        }
    }
}
