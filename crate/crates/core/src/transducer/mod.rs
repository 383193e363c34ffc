//! Nondeterministic real-time transducers `⟨Q, A, B, δ, I, F⟩`.
//!
//! Every transition reads exactly one input symbol and writes a possibly
//! empty output word. Machines are trimmed on construction: only states that
//! are reachable from `I` and can reach a final state lying on a cycle are
//! kept, which is the finite surrogate for occurring in a Büchi-accepting run.

mod ops;
mod run;

use std::collections::{HashMap, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Sym};
use crate::error::{Error, Result};

pub use ops::{
    check_injective_blocks, check_kraft_bound, compose, min_output_length, min_output_lengths, InjectivityReport,
    KraftAudit,
};
pub(crate) use ops::ratio_f64;
pub use run::{resolve_outputs, run, run_complete, Candidate, Resolution, RunResult, Runner, DEFAULT_WIDTH_CAP};

pub type StateId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub from: StateId,
    pub input: Sym,
    pub output: Vec<Sym>,
    pub to: StateId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transducer {
    names: Vec<String>,
    input: Alphabet,
    output: Alphabet,
    transitions: Vec<Transition>,
    initial: Vec<bool>,
    finals: Vec<bool>,
    /// `out[q][a]`: indices of transitions leaving `q` on input `a`.
    out: Vec<Vec<Vec<usize>>>,
}

impl Transducer {
    /// Builds and trims a machine. States are identified by index into `names`.
    pub fn new(
        names: Vec<String>,
        input: Alphabet,
        output: Alphabet,
        transitions: Vec<Transition>,
        initial: &[StateId],
        finals: &[StateId],
    ) -> Result<Self> {
        let n = names.len();
        for t in &transitions {
            if t.from >= n || t.to >= n {
                return Err(Error::InvalidTransducer(format!("transition references state {} of {n}", t.from.max(t.to))));
            }
            input.check_word(&[t.input])?;
            output.check_word(&t.output)?;
        }
        let mut init = vec![false; n];
        let mut fin = vec![false; n];
        for &q in initial {
            *init.get_mut(q).ok_or_else(|| Error::InvalidTransducer(format!("initial state {q} out of range")))? = true;
        }
        for &q in finals {
            *fin.get_mut(q).ok_or_else(|| Error::InvalidTransducer(format!("final state {q} out of range")))? = true;
        }
        let mut seen = std::collections::HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidTransducer(format!("duplicate state {name:?}")));
            }
        }
        let raw = Self { out: Vec::new(), names, input, output, transitions, initial: init, finals: fin };
        raw.trimmed()
    }

    /// The transducer copying its input: one state, loops `a|a`.
    pub fn identity(alphabet: Alphabet) -> Self {
        let transitions = (0..alphabet.len() as Sym)
            .map(|a| Transition { from: 0, input: a, output: vec![a], to: 0 })
            .collect();
        Self::new(vec!["q0".into()], alphabet.clone(), alphabet, transitions, &[0], &[0]).expect("identity is trim")
    }

    /// Multiplication by 3 on binary expansions: the state is the carry
    /// still owed by the unread suffix.
    pub fn times_three() -> Self {
        Self::from_json(TIMES_THREE_JSON).expect("fixture is valid")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: TransducerFile = serde_json::from_str(s)?;
        file.into_transducer()
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.names[q]
    }

    pub fn input_alphabet(&self) -> &Alphabet {
        &self.input
    }

    pub fn output_alphabet(&self) -> &Alphabet {
        &self.output
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn is_initial(&self, q: StateId) -> bool {
        self.initial[q]
    }

    pub fn is_final(&self, q: StateId) -> bool {
        self.finals[q]
    }

    pub fn initial_states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.num_states()).filter(|&q| self.initial[q])
    }

    pub fn final_states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.num_states()).filter(|&q| self.finals[q])
    }

    /// Transitions leaving `q` on input `a`.
    pub fn successors(&self, q: StateId, a: Sym) -> impl Iterator<Item = &Transition> + '_ {
        self.out[q].get(a as usize).into_iter().flatten().map(|&i| &self.transitions[i])
    }

    /// `r_C`: the longest output of a single transition.
    pub fn max_output_length(&self) -> usize {
        self.transitions.iter().map(|t| t.output.len()).max().unwrap_or(0)
    }

    /// Whether the machine has one initial state and at most one
    /// transition per (state, input symbol).
    pub fn is_deterministic(&self) -> bool {
        self.initial_states().count() == 1 && self.out.iter().all(|row| row.iter().all(|ts| ts.len() <= 1))
    }

    pub fn to_file(&self) -> TransducerFile {
        TransducerFile {
            states: self.names.clone(),
            input_alphabet: self.input.to_strings(),
            output_alphabet: self.output.to_strings(),
            initial: self.initial_states().map(|q| self.names[q].clone()).collect(),
            r#final: self.final_states().map(|q| self.names[q].clone()).collect(),
            transitions: self
                .transitions
                .iter()
                .map(|t| TransitionFile {
                    from: self.names[t.from].clone(),
                    input: self.input.glyph(t.input).to_string(),
                    output: self.output.render(&t.output),
                    to: self.names[t.to].clone(),
                })
                .collect(),
        }
    }

    /// Keeps states reachable from `I` that can reach a final state on a cycle.
    fn trimmed(self) -> Result<Self> {
        let n = self.names.len();
        let mut g = DiGraph::<(), ()>::with_capacity(n, self.transitions.len());
        let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
        for t in &self.transitions {
            g.add_edge(nodes[t.from], nodes[t.to], ());
        }
        let mut recurrent = vec![false; n];
        for scc in tarjan_scc(&g) {
            let cyclic = scc.len() > 1 || g.contains_edge(scc[0], scc[0]);
            if cyclic {
                for v in scc {
                    recurrent[v.index()] = self.finals[v.index()];
                }
            }
        }
        let forward = self.closure((0..n).filter(|&q| self.initial[q]), false);
        let backward = self.closure((0..n).filter(|&q| recurrent[q]), true);
        let keep: Vec<bool> = (0..n).map(|q| forward[q] && backward[q]).collect();
        if !keep.iter().any(|&k| k) || !(0..n).any(|q| keep[q] && self.initial[q]) {
            return Err(Error::EmptyAfterTrim);
        }
        let dropped: Vec<&str> = (0..n).filter(|&q| !keep[q]).map(|q| self.names[q].as_str()).collect();
        if !dropped.is_empty() {
            log::warn!("trimmed {} state(s) not on any accepting run: {}", dropped.len(), dropped.join(", "));
        }

        let mut renumber = vec![usize::MAX; n];
        let mut names = Vec::new();
        for q in 0..n {
            if keep[q] {
                renumber[q] = names.len();
                names.push(self.names[q].clone());
            }
        }
        let transitions: Vec<Transition> = self
            .transitions
            .into_iter()
            .filter(|t| keep[t.from] && keep[t.to])
            .map(|t| Transition { from: renumber[t.from], to: renumber[t.to], ..t })
            .collect();
        let pick = |v: &[bool]| (0..n).filter(|&q| keep[q]).map(|q| v[q]).collect::<Vec<bool>>();
        let initial = pick(&self.initial);
        let finals = pick(&self.finals);
        let mut out = vec![vec![Vec::new(); self.input.len()]; names.len()];
        for (i, t) in transitions.iter().enumerate() {
            out[t.from][t.input as usize].push(i);
        }
        Ok(Self { names, input: self.input, output: self.output, transitions, initial, finals, out })
    }

    fn closure(&self, start: impl Iterator<Item = StateId>, reverse: bool) -> Vec<bool> {
        let n = self.names.len();
        let mut adj = vec![Vec::new(); n];
        for t in &self.transitions {
            if reverse {
                adj[t.to].push(t.from);
            } else {
                adj[t.from].push(t.to);
            }
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        for q in start {
            if !seen[q] {
                seen[q] = true;
                queue.push_back(q);
            }
        }
        while let Some(q) = queue.pop_front() {
            for &p in &adj[q] {
                if !seen[p] {
                    seen[p] = true;
                    queue.push_back(p);
                }
            }
        }
        seen
    }
}

/// JSON transducer description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransducerFile {
    pub states: Vec<String>,
    pub input_alphabet: Vec<String>,
    pub output_alphabet: Vec<String>,
    pub initial: Vec<String>,
    pub r#final: Vec<String>,
    pub transitions: Vec<TransitionFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionFile {
    pub from: String,
    #[serde(rename = "in")]
    pub input: String,
    #[serde(rename = "out")]
    pub output: String,
    pub to: String,
}

impl TransducerFile {
    pub fn into_transducer(self) -> Result<Transducer> {
        let input = Alphabet::from_strings(&self.input_alphabet)?;
        let output = Alphabet::from_strings(&self.output_alphabet)?;
        if input.is_empty() {
            return Err(Error::InvalidTransducer("empty input alphabet".into()));
        }
        let ids: HashMap<&str, StateId> = self.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let id = |s: &str| -> Result<StateId> {
            ids.get(s).copied().ok_or_else(|| Error::InvalidTransducer(format!("unknown state {s:?}")))
        };
        let mut transitions = Vec::with_capacity(self.transitions.len());
        for t in &self.transitions {
            let mut chars = t.input.chars();
            let a = match (chars.next(), chars.next()) {
                (Some(c), None) => input.index_of(c)?,
                _ => {
                    return Err(Error::InvalidTransducer(format!(
                        "transition input {:?} must be exactly one symbol",
                        t.input
                    )))
                }
            };
            transitions.push(Transition { from: id(&t.from)?, input: a, output: output.parse_word(&t.output)?, to: id(&t.to)? });
        }
        let initial = self.initial.iter().map(|s| id(s)).collect::<Result<Vec<_>>>()?;
        let finals = self.r#final.iter().map(|s| id(s)).collect::<Result<Vec<_>>>()?;
        Transducer::new(self.states, input, output, transitions, &initial, &finals)
    }
}

const TIMES_THREE_JSON: &str = r#"{
  "states": ["q0", "q1", "q2"],
  "input_alphabet": ["0", "1"],
  "output_alphabet": ["0", "1"],
  "initial": ["q0"],
  "final": ["q0", "q1", "q2"],
  "transitions": [
    {"from": "q0", "in": "0", "out": "0", "to": "q0"},
    {"from": "q0", "in": "0", "out": "1", "to": "q1"},
    {"from": "q1", "in": "1", "out": "1", "to": "q0"},
    {"from": "q1", "in": "0", "out": "0", "to": "q2"},
    {"from": "q2", "in": "1", "out": "1", "to": "q2"},
    {"from": "q2", "in": "1", "out": "0", "to": "q1"}
  ]
}"#;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn times_three_trims_to_itself() {
        let t = Transducer::times_three();
        assert_eq!(t.num_states(), 3);
        assert_eq!(t.transitions().len(), 6);
        assert_eq!(t.final_states().count(), 3);
        assert_eq!(t.initial_states().collect::<Vec<_>>(), vec![0]);
        assert!(!t.is_deterministic());
        let again = t.to_file().into_transducer().unwrap();
        assert_eq!(again, t);
    }

    #[test]
    fn identity_loads() {
        let t = Transducer::identity(Alphabet::binary());
        assert_eq!(t.num_states(), 1);
        assert!(t.is_deterministic());
        assert_eq!(t.max_output_length(), 1);
    }

    #[test]
    fn unreachable_and_dead_states_are_trimmed() {
        let json = r#"{"states":["a","b","dead","orphan"],"input_alphabet":["0","1"],"output_alphabet":["0","1"],
            "initial":["a"],"final":["a"],
            "transitions":[{"from":"a","in":"0","out":"0","to":"b"},{"from":"b","in":"1","out":"1","to":"a"},
                           {"from":"a","in":"1","out":"","to":"dead"},{"from":"orphan","in":"0","out":"0","to":"a"}]}"#;
        let t = Transducer::from_json(json).unwrap();
        assert_eq!(t.num_states(), 2);
        assert_eq!(t.state_name(1), "b");
        assert_eq!(t.transitions().len(), 2);
    }

    #[test]
    fn final_state_without_cycle_is_not_enough() {
        let json = r#"{"states":["a","b"],"input_alphabet":["0"],"output_alphabet":["0"],
            "initial":["a"],"final":["b"],"transitions":[{"from":"a","in":"0","out":"0","to":"b"}]}"#;
        assert!(matches!(Transducer::from_json(json), Err(Error::EmptyAfterTrim)));
    }

    #[test]
    fn malformed_files() {
        let base = |t: &str| {
            format!(
                r#"{{"states":["a"],"input_alphabet":["0"],"output_alphabet":["0"],"initial":["a"],"final":["a"],"transitions":[{t}]}}"#
            )
        };
        assert!(Transducer::from_json(&base(r#"{"from":"a","in":"00","out":"0","to":"a"}"#)).is_err());
        assert!(Transducer::from_json(&base(r#"{"from":"a","in":"0","out":"2","to":"a"}"#)).is_err());
        assert!(Transducer::from_json(&base(r#"{"from":"z","in":"0","out":"0","to":"a"}"#)).is_err());
        assert!(Transducer::from_json(&base(r#"{"from":"a","in":"0","out":"0","to":"a","x":1}"#)).is_err());
        assert!(Transducer::from_json(&base(r#"{"from":"a","in":"0","out":"","to":"a"}"#)).is_ok());
    }
}
