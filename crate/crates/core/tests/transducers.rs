mod common;

use common::read_fixture;
use proptest::prelude::*;
use sftnorm::alphabet::{Alphabet, Sym};
use sftnorm::transducer::{
    check_injective_blocks, check_kraft_bound, compose, min_output_length, run, Runner, Transducer, Transition,
};

/// A complete deterministic binary machine with every state final.
fn deterministic(states: usize, table: &[(usize, Vec<Sym>)]) -> Transducer {
    let mut transitions = Vec::new();
    for q in 0..states {
        for a in 0..2 {
            let (to, out) = &table[q * 2 + a];
            transitions.push(Transition { from: q, input: a as Sym, output: out.clone(), to: to % states });
        }
    }
    let names = (0..states).map(|q| format!("s{q}")).collect();
    let finals: Vec<usize> = (0..states).collect();
    Transducer::new(names, Alphabet::binary(), Alphabet::binary(), transitions, &[0], &finals).unwrap()
}

fn machine() -> impl Strategy<Value = Transducer> {
    (1usize..=4).prop_flat_map(|n| {
        proptest::collection::vec((0usize..4, proptest::collection::vec(0u32..2, 0..=3)), n * 2)
            .prop_map(move |table| deterministic(n, &table))
    })
}

fn flip() -> Transducer {
    deterministic(1, &[(0, vec![1]), (0, vec![0])])
}

/// Echoes the previous symbol, so the output lags the input by one.
fn delay() -> Transducer {
    let t = vec![
        Transition { from: 0, input: 0, output: vec![], to: 1 },
        Transition { from: 0, input: 1, output: vec![], to: 2 },
        Transition { from: 1, input: 0, output: vec![0], to: 1 },
        Transition { from: 1, input: 1, output: vec![0], to: 2 },
        Transition { from: 2, input: 0, output: vec![1], to: 1 },
        Transition { from: 2, input: 1, output: vec![1], to: 2 },
    ];
    let names = vec!["start".into(), "held0".into(), "held1".into()];
    Transducer::new(names, Alphabet::binary(), Alphabet::binary(), t, &[0], &[0, 1, 2]).unwrap()
}

fn pipe(machines: &[&Transducer], x: &[Sym]) -> Option<Vec<Sym>> {
    let mut cur = x.to_vec();
    for t in machines.iter().rev() {
        cur = run(t, &cur).ok()?.output;
    }
    Some(cur)
}

fn bits(s: &str) -> Vec<Sym> {
    Alphabet::binary().parse_word(s).unwrap()
}

#[test]
fn fixture_matches_builtin_times_three() {
    let t = Transducer::from_json(&read_fixture("mult3.json")).unwrap();
    assert_eq!(t, Transducer::times_three());
}

#[test]
fn unreachable_fixture_is_trimmed() {
    let t = Transducer::from_json(&read_fixture("unreachable.json")).unwrap();
    let states: Vec<&str> = (0..t.num_states()).map(|q| t.state_name(q)).collect();
    assert!(!states.contains(&"orphan"), "{states:?}");
}

#[test]
fn delay_lags_by_one() {
    assert_eq!(run(&delay(), &bits("10110")).unwrap().output, bits("1011"));
}

#[test]
fn times_three_is_injective_with_kraft_bound() {
    let t = Transducer::times_three();
    assert!(check_injective_blocks(&t, 10).unwrap().injective);
    for l in 1..=10 {
        assert!(check_kraft_bound(&t, l, 1).unwrap().holds, "l={l}");
    }
}

#[test]
fn compositions_with_times_three_match_piping() {
    let t3 = Transducer::times_three();
    let (f, d) = (flip(), delay());
    let machines: [(&str, Vec<&Transducer>); 3] =
        [("t3∘f", vec![&t3, &f]), ("f∘t3", vec![&f, &t3]), ("d∘t3∘f", vec![&d, &t3, &f])];
    let mut defined = 0;
    for (name, ms) in &machines {
        let mut composed = ms[ms.len() - 1].clone();
        for m in ms[..ms.len() - 1].iter().rev() {
            composed = compose(m, &composed).unwrap();
        }
        for n in 0..=10 {
            for x in common::all_words(2, n) {
                // trimming drops prefixes with no infinite continuation, which piping
                // finite words cannot see, so only defined composed runs are compared
                if let Ok(got) = run(&composed, &x) {
                    defined += 1;
                    assert_eq!(pipe(ms, &x), Some(got.output), "{name} on {x:?}");
                }
            }
        }
    }
    assert!(defined > 100);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn streaming_run_matches_batch(t in machine(), x in proptest::collection::vec(0u32..2, 0..60)) {
        let batch = run(&t, &x).unwrap();
        prop_assert_eq!(&run(&t, &x).unwrap(), &batch);
        let mut r = Runner::new(&t);
        for &a in &x {
            r.step(a).unwrap();
        }
        prop_assert_eq!(r.consumed(), x.len());
        prop_assert_eq!(r.output_len().unwrap(), batch.output.len() as u64);
        prop_assert_eq!(r.result().unwrap(), batch.clone());
        prop_assert_eq!(batch.visited.len(), x.len() + 1);
    }

    #[test]
    fn min_output_length_bounds_runs(t in machine(), x in proptest::collection::vec(0u32..2, 0..40)) {
        let out = run(&t, &x).unwrap().output;
        // the minimum ranges over runs from every state, not only the initial one
        prop_assert!(min_output_length(&t, &x).unwrap() <= out.len() as u64);
        let t3 = Transducer::times_three();
        if let Ok(r) = run(&t3, &x) {
            prop_assert!(min_output_length(&t3, &x).unwrap() <= r.output.len() as u64);
        }
    }

    #[test]
    fn compose_is_associative(
        a in machine(),
        b in machine(),
        c in machine(),
        x in proptest::collection::vec(0u32..2, 0..30),
    ) {
        let left = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let right = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        let expected = pipe(&[&a, &b, &c], &x).unwrap();
        prop_assert_eq!(&run(&left, &x).unwrap().output, &expected);
        prop_assert_eq!(&run(&right, &x).unwrap().output, &expected);
    }

    #[test]
    fn injective_machines_satisfy_kraft(t in machine(), l in 1usize..=8) {
        let inj = check_injective_blocks(&t, l).unwrap();
        if inj.injective {
            let audit = check_kraft_bound(&t, l, 1).unwrap();
            prop_assert!(audit.holds, "{:?}", audit);
            prop_assert_eq!(audit.words_without_run, 0);
        }
    }
}
