//! Machine-level operations: composition, minimal outputs, the generalized
//! Kraft audit and bounded-depth injectivity.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::run::{resolve_outputs, Candidate, Resolution, DEFAULT_WIDTH_CAP};
use super::{StateId, Transducer, Transition};
use crate::alphabet::{checked_word_count, Sym};
use crate::error::{Error, Result};
use crate::shift::DEFAULT_ENUMERATION_CAP;

/// The product machine computing `outer(inner(x))`.
///
/// Inner outputs are fed through `outer` symbol by symbol, so one product
/// transition may stand for several outer transitions. A product state is
/// initial (final) iff both components are.
pub fn compose(outer: &Transducer, inner: &Transducer) -> Result<Transducer> {
    let mid = inner.output_alphabet();
    if !mid.same_set(outer.input_alphabet()) {
        return Err(Error::AlphabetMismatch(format!(
            "inner output alphabet {:?} differs from outer input alphabet {:?}",
            mid,
            outer.input_alphabet()
        )));
    }
    let relabel: Vec<Sym> = mid
        .glyphs()
        .iter()
        .map(|&c| outer.input_alphabet().index_of(c))
        .collect::<Result<_>>()?;

    let mut ids: HashMap<(StateId, StateId), StateId> = HashMap::new();
    let mut pairs = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |p: StateId, q: StateId, pairs: &mut Vec<(StateId, StateId)>, queue: &mut VecDeque<StateId>| {
        *ids.entry((p, q)).or_insert_with(|| {
            pairs.push((p, q));
            queue.push_back(pairs.len() - 1);
            pairs.len() - 1
        })
    };
    let mut initial = Vec::new();
    for p in inner.initial_states() {
        for q in outer.initial_states() {
            initial.push(intern(p, q, &mut pairs, &mut queue));
        }
    }
    let mut transitions = Vec::new();
    while let Some(id) = queue.pop_front() {
        let (p, q) = pairs[id];
        for t in inner.transitions().iter().filter(|t| t.from == p) {
            let v: Vec<Sym> = t.output.iter().map(|&s| relabel[s as usize]).collect();
            for (q2, w) in outer_paths(outer, q, &v)? {
                let to = intern(t.to, q2, &mut pairs, &mut queue);
                transitions.push(Transition { from: id, input: t.input, output: w, to });
            }
        }
    }
    let finals: Vec<StateId> =
        (0..pairs.len()).filter(|&i| inner.is_final(pairs[i].0) && outer.is_final(pairs[i].1)).collect();
    let names = pairs
        .iter()
        .map(|&(p, q)| format!("({},{})", inner.state_name(p), outer.state_name(q)))
        .collect();
    Transducer::new(names, inner.input_alphabet().clone(), outer.output_alphabet().clone(), transitions, &initial, &finals)
}

/// Every `(end state, output)` of runs of `t` from `q` labeled `v`.
fn outer_paths(t: &Transducer, q: StateId, v: &[Sym]) -> Result<Vec<(StateId, Vec<Sym>)>> {
    let mut cur = vec![(q, Vec::new())];
    for &a in v {
        let mut next = Vec::new();
        for (s, out) in &cur {
            for tr in t.successors(*s, a) {
                let mut o = out.clone();
                o.extend_from_slice(&tr.output);
                next.push((tr.to, o));
            }
        }
        next.sort_unstable();
        next.dedup();
        if next.len() > DEFAULT_WIDTH_CAP {
            return Err(Error::WidthExceeded { width: next.len(), cap: DEFAULT_WIDTH_CAP });
        }
        cur = next;
    }
    Ok(cur)
}

fn relax(t: &Transducer, dist: &[u64], a: Sym) -> Vec<u64> {
    let mut next = vec![u64::MAX; dist.len()];
    for (p, &d) in dist.iter().enumerate() {
        if d == u64::MAX {
            continue;
        }
        for tr in t.successors(p, a) {
            let c = d + tr.output.len() as u64;
            if c < next[tr.to] {
                next[tr.to] = c;
            }
        }
    }
    next
}

/// `L_C(w)`: the fewest output symbols over finite runs labeled `w`, from any state.
pub fn min_output_length(t: &Transducer, w: &[Sym]) -> Result<u64> {
    t.input_alphabet().check_word(w)?;
    let mut dist = vec![0u64; t.num_states()];
    for &a in w {
        dist = relax(t, &dist, a);
    }
    dist.into_iter().min().filter(|&d| d != u64::MAX).ok_or(Error::NoRun)
}

/// `L_C(w)` for every `w ∈ A^ℓ` in lexicographic order; `None` where no run exists.
pub fn min_output_lengths(t: &Transducer, l: usize) -> Result<Vec<Option<u64>>> {
    let radix = t.input_alphabet().len();
    let total = checked_word_count(radix, l, DEFAULT_ENUMERATION_CAP)?;
    let mut out = Vec::with_capacity(total as usize);
    let mut stack = vec![vec![0u64; t.num_states()]];
    walk(t, l, &mut stack, &mut out);
    Ok(out)
}

fn walk(t: &Transducer, l: usize, stack: &mut Vec<Vec<u64>>, out: &mut Vec<Option<u64>>) {
    let depth = stack.len() - 1;
    if depth == l {
        out.push(stack[depth].iter().copied().min().filter(|&d| d != u64::MAX));
        return;
    }
    for a in 0..t.input_alphabet().len() as Sym {
        let next = relax(t, &stack[depth], a);
        if next.iter().all(|&d| d == u64::MAX) {
            // every extension is dead as well
            let dead = t.input_alphabet().len().pow((l - depth - 1) as u32);
            out.extend(std::iter::repeat(None).take(dead));
            continue;
        }
        stack.push(next);
        walk(t, l, stack, out);
        stack.pop();
    }
}

/// Both sides of `Σ_{w∈A^ℓ} 2^{−L(w)} ≤ K|Q|²(1 + ℓ·r_C)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KraftAudit {
    pub block_length: usize,
    pub k: u64,
    pub states: usize,
    pub r_c: usize,
    pub words: u64,
    /// Words with no finite run; they contribute 0 to the sum.
    pub words_without_run: u64,
    /// `L ↦ |{w : L(w) = L}|`.
    pub length_histogram: BTreeMap<u64, u64>,
    /// The left side equals `lhs_numerator / 2^lhs_denominator_log2` exactly.
    pub lhs_numerator: String,
    pub lhs_denominator_log2: u64,
    pub lhs: f64,
    pub rhs: String,
    pub margin: f64,
    pub holds: bool,
}

pub fn check_kraft_bound(t: &Transducer, l: usize, k: u64) -> Result<KraftAudit> {
    let lengths = min_output_lengths(t, l)?;
    let mut hist = BTreeMap::new();
    let mut missing = 0u64;
    for len in &lengths {
        match len {
            Some(v) => *hist.entry(*v).or_insert(0u64) += 1,
            None => missing += 1,
        }
    }
    let top = hist.keys().next_back().copied().unwrap_or(0);
    let mut num = BigUint::zero();
    for (&len, &count) in &hist {
        num += BigUint::from(count) << (top - len) as usize;
    }
    let q = t.num_states() as u64;
    let r_c = t.max_output_length();
    let rhs = BigUint::from(k) * BigUint::from(q) * BigUint::from(q) * (BigUint::from(1u64) + BigUint::from(l as u64) * BigUint::from(r_c as u64));
    let holds = num <= (&rhs << top as usize);
    let lhs = ratio_f64(&num, top);
    let rhs_f = rhs.to_f64().unwrap_or(f64::INFINITY);
    Ok(KraftAudit {
        block_length: l,
        k,
        states: t.num_states(),
        r_c,
        words: lengths.len() as u64,
        words_without_run: missing,
        length_histogram: hist,
        lhs_numerator: num.to_string(),
        lhs_denominator_log2: top,
        lhs,
        rhs: rhs.to_string(),
        margin: rhs_f - lhs,
        holds,
    })
}

/// `num / 2^log2_den` as a float without overflowing on large exponents.
pub(crate) fn ratio_f64(num: &BigUint, log2_den: u64) -> f64 {
    let bits = num.bits();
    let shift = bits.saturating_sub(60);
    let mantissa = (num >> shift as usize).to_f64().unwrap_or(0.0);
    mantissa * 2f64.powi(shift as i32 - log2_den as i32)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjectivityReport {
    pub depth: usize,
    /// Input words examined, over all lengths `1..=depth`.
    pub words: u64,
    /// Words with a complete run whose output is defined.
    pub complete: u64,
    pub injective: bool,
    /// Two same-length inputs and their common output, if any.
    pub witness: Option<(Vec<Sym>, Vec<Sym>, Vec<Sym>)>,
}

/// Exhaustively compares outputs of complete runs on inputs of equal length
/// up to `depth`. A run is complete when it ends in a final state; words
/// whose complete runs leave the output undetermined are skipped.
pub fn check_injective_blocks(t: &Transducer, depth: usize) -> Result<InjectivityReport> {
    let radix = t.input_alphabet().len();
    let mut total: u128 = 0;
    for m in 1..=depth {
        total += checked_word_count(radix, m, DEFAULT_ENUMERATION_CAP)?;
        if total > DEFAULT_ENUMERATION_CAP {
            return Err(Error::CapExceeded { requested: total, cap: DEFAULT_ENUMERATION_CAP });
        }
    }
    let mut search = Search { t, depth, seen: HashMap::new(), words: 0, complete: 0, witness: None, word: Vec::new() };
    let start: Vec<(StateId, Vec<Sym>)> = t.initial_states().map(|q| (q, Vec::new())).collect();
    search.dfs(&start)?;
    Ok(InjectivityReport {
        depth,
        words: search.words,
        complete: search.complete,
        injective: search.witness.is_none(),
        witness: search.witness,
    })
}

struct Search<'t> {
    t: &'t Transducer,
    depth: usize,
    seen: HashMap<(usize, Vec<Sym>), Vec<Sym>>,
    words: u64,
    complete: u64,
    witness: Option<(Vec<Sym>, Vec<Sym>, Vec<Sym>)>,
    word: Vec<Sym>,
}

impl Search<'_> {
    fn dfs(&mut self, frontier: &[(StateId, Vec<Sym>)]) -> Result<()> {
        if self.witness.is_some() || self.word.len() == self.depth {
            return Ok(());
        }
        for a in 0..self.t.input_alphabet().len() as Sym {
            let mut next = Vec::new();
            for (q, out) in frontier {
                for tr in self.t.successors(*q, a) {
                    let mut o = out.clone();
                    o.extend_from_slice(&tr.output);
                    next.push((tr.to, o));
                }
            }
            next.sort_unstable();
            next.dedup();
            if next.len() > DEFAULT_WIDTH_CAP {
                return Err(Error::WidthExceeded { width: next.len(), cap: DEFAULT_WIDTH_CAP });
            }
            self.word.push(a);
            self.words += 1;
            self.visit(&next)?;
            if next.is_empty() {
                let radix = self.t.input_alphabet().len() as u64;
                let below = self.depth - self.word.len();
                self.words += (1..=below as u32).map(|j| radix.pow(j)).sum::<u64>();
            } else {
                self.dfs(&next)?;
            }
            self.word.pop();
            if self.witness.is_some() {
                break;
            }
        }
        Ok(())
    }

    fn visit(&mut self, runs: &[(StateId, Vec<Sym>)]) -> Result<()> {
        let cands: Vec<Candidate<'_>> = runs
            .iter()
            .filter(|(q, _)| self.t.is_final(*q))
            .map(|(q, o)| Candidate { state: *q, output: o })
            .collect();
        let output = match resolve_outputs(self.t, &cands) {
            Resolution::Unique(i) => cands[i].output.to_vec(),
            Resolution::NoCandidate | Resolution::Undetermined { .. } => return Ok(()),
            Resolution::Ambiguous { outputs } => {
                return Err(Error::Ambiguous { position: self.word.len(), outputs });
            }
        };
        self.complete += 1;
        if let Some(prev) = self.seen.insert((self.word.len(), output.clone()), self.word.clone()) {
            self.witness = Some((prev, self.word.clone(), output));
        }
        Ok(())
    }
}
