//! Run search over finite inputs.
//!
//! All runs from `I` are followed in parallel, one input symbol at a time.
//! Since machines are trim, every live run can still be extended to a
//! Büchi-accepting one. When live runs disagree on their output, only the
//! closed runs (those currently in an initial state, where no obligation
//! toward the unread suffix is pending) are considered; the output is defined
//! if they all agree.

use serde::{Deserialize, Serialize};

use super::{StateId, Transducer};
use crate::alphabet::Sym;
use crate::error::{Error, Result};

/// Default limit on simultaneously tracked runs.
pub const DEFAULT_WIDTH_CAP: usize = 1 << 16;

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunResult {
    pub output: Vec<Sym>,
    /// States along the run, `|input| + 1` of them.
    pub visited: Vec<StateId>,
    /// Positions `i ≥ 1` at which the run entered a final state.
    pub final_hits: Vec<usize>,
}

/// One run's end state and output, as seen by [`resolve_outputs`].
#[derive(Clone, Copy, Debug)]
pub struct Candidate<'a> {
    pub state: StateId,
    pub output: &'a [Sym],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Resolution {
    /// Index of a candidate carrying the defined output.
    Unique(usize),
    NoCandidate,
    /// Outputs differ and no run is closed.
    Undetermined { outputs: usize },
    /// Closed runs themselves disagree.
    Ambiguous { outputs: usize },
}

fn distinct<'a>(outputs: impl Iterator<Item = &'a [Sym]>) -> usize {
    let mut v: Vec<&[Sym]> = outputs.collect();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// Picks the output of a set of runs on the same input.
pub fn resolve_outputs(t: &Transducer, cands: &[Candidate<'_>]) -> Resolution {
    if cands.is_empty() {
        return Resolution::NoCandidate;
    }
    let all = distinct(cands.iter().map(|c| c.output));
    if all == 1 {
        return Resolution::Unique(0);
    }
    let closed: Vec<usize> = (0..cands.len()).filter(|&i| t.is_initial(cands[i].state)).collect();
    match distinct(closed.iter().map(|&i| cands[i].output)) {
        0 => Resolution::Undetermined { outputs: all },
        1 => Resolution::Unique(closed[0]),
        _ => Resolution::Ambiguous { outputs: all },
    }
}

#[derive(Clone, Copy, Debug)]
struct Node {
    prev: u32,
    transition: u32,
    state: u32,
    out_len: u64,
}

/// Incremental run search, one input symbol per [`Runner::step`].
#[derive(Clone, Debug)]
pub struct Runner<'t> {
    t: &'t Transducer,
    nodes: Vec<Node>,
    frontier: Vec<u32>,
    consumed: usize,
    width_cap: usize,
}

impl<'t> Runner<'t> {
    pub fn new(t: &'t Transducer) -> Self {
        Self::with_width_cap(t, DEFAULT_WIDTH_CAP)
    }

    pub fn with_width_cap(t: &'t Transducer, width_cap: usize) -> Self {
        let nodes: Vec<Node> = t
            .initial_states()
            .map(|q| Node { prev: NONE, transition: NONE, state: q as u32, out_len: 0 })
            .collect();
        let frontier = (0..nodes.len() as u32).collect();
        Self { t, nodes, frontier, consumed: 0, width_cap }
    }

    pub fn consumed(&self) -> usize {
        self.consumed
    }

    /// Number of live runs.
    pub fn width(&self) -> usize {
        self.frontier.len()
    }

    /// Reads one symbol. On rejection the runner is left unchanged.
    pub fn step(&mut self, a: Sym) -> Result<()> {
        self.t.input_alphabet().check_word(&[a])?;
        let width: usize = self
            .frontier
            .iter()
            .map(|&id| self.t.out[self.nodes[id as usize].state as usize][a as usize].len())
            .sum();
        if width == 0 {
            return Err(Error::Rejected { position: self.consumed });
        }
        if width > self.width_cap {
            return Err(Error::WidthExceeded { width, cap: self.width_cap });
        }
        let mut frontier = Vec::with_capacity(width);
        for &id in &self.frontier {
            let node = self.nodes[id as usize];
            for &ti in self.t.out[node.state as usize][a as usize].iter() {
                let tr = &self.t.transitions[ti];
                frontier.push(self.nodes.len() as u32);
                self.nodes.push(Node {
                    prev: id,
                    transition: ti as u32,
                    state: tr.to as u32,
                    out_len: node.out_len + tr.output.len() as u64,
                });
            }
        }
        self.frontier = frontier;
        self.consumed += 1;
        if self.frontier.len() == 1 && self.nodes.len() > (1 << 20).max(4 * self.consumed) {
            self.compact();
        }
        Ok(())
    }

    pub fn feed(&mut self, x: &[Sym]) -> Result<()> {
        x.iter().try_for_each(|&a| self.step(a))
    }

    /// Output length of the resolved run over all live runs.
    pub fn output_len(&self) -> Result<u64> {
        if let [only] = self.frontier[..] {
            return Ok(self.nodes[only as usize].out_len);
        }
        let id = self.resolve(false)?;
        Ok(self.nodes[id as usize].out_len)
    }

    /// The resolved run among live runs.
    pub fn result(&self) -> Result<RunResult> {
        let id = self.resolve(false)?;
        Ok(self.reconstruct(id))
    }

    /// The resolved run among runs currently in a final state.
    pub fn complete_result(&self) -> Result<RunResult> {
        let id = self.resolve(true)?;
        Ok(self.reconstruct(id))
    }

    fn resolve(&self, final_only: bool) -> Result<u32> {
        let ids: Vec<u32> = self
            .frontier
            .iter()
            .copied()
            .filter(|&id| !final_only || self.t.is_final(self.nodes[id as usize].state as usize))
            .collect();
        let outputs: Vec<Vec<Sym>> = if ids.len() > 1 { ids.iter().map(|&id| self.output_of(id)).collect() } else { Vec::new() };
        let cands: Vec<Candidate<'_>> = ids
            .iter()
            .enumerate()
            .map(|(i, &id)| Candidate {
                state: self.nodes[id as usize].state as usize,
                output: outputs.get(i).map(|o| o.as_slice()).unwrap_or(&[]),
            })
            .collect();
        match resolve_outputs(self.t, &cands) {
            Resolution::Unique(i) => Ok(ids[i]),
            Resolution::NoCandidate if final_only => Err(Error::NoRun),
            Resolution::NoCandidate => Err(Error::Rejected { position: self.consumed }),
            Resolution::Undetermined { outputs } | Resolution::Ambiguous { outputs } => {
                Err(Error::Ambiguous { position: self.consumed, outputs })
            }
        }
    }

    fn output_of(&self, mut id: u32) -> Vec<Sym> {
        let mut pieces = Vec::new();
        while self.nodes[id as usize].prev != NONE {
            let node = self.nodes[id as usize];
            pieces.push(&self.t.transitions[node.transition as usize].output);
            id = node.prev;
        }
        pieces.iter().rev().flat_map(|p| p.iter().copied()).collect()
    }

    fn reconstruct(&self, mut id: u32) -> RunResult {
        let mut states = Vec::with_capacity(self.consumed + 1);
        let mut pieces = Vec::with_capacity(self.consumed);
        loop {
            let node = self.nodes[id as usize];
            states.push(node.state as usize);
            if node.prev == NONE {
                break;
            }
            pieces.push(&self.t.transitions[node.transition as usize].output);
            id = node.prev;
        }
        states.reverse();
        let output = pieces.iter().rev().flat_map(|p| p.iter().copied()).collect();
        let final_hits = (1..states.len()).filter(|&i| self.t.is_final(states[i])).collect();
        RunResult { output, visited: states, final_hits }
    }

    /// With a single live run, drops every node not on it.
    fn compact(&mut self) {
        let mut chain = Vec::new();
        let mut id = self.frontier[0];
        loop {
            chain.push(self.nodes[id as usize]);
            let prev = self.nodes[id as usize].prev;
            if prev == NONE {
                break;
            }
            id = prev;
        }
        chain.reverse();
        for (i, node) in chain.iter_mut().enumerate() {
            node.prev = if i == 0 { NONE } else { i as u32 - 1 };
        }
        self.frontier = vec![chain.len() as u32 - 1];
        self.nodes = chain;
    }
}

/// Runs `t` on `x` and returns the resolved run.
pub fn run(t: &Transducer, x: &[Sym]) -> Result<RunResult> {
    let mut r = Runner::new(t);
    r.feed(x)?;
    r.result()
}

/// Like [`run`] but only among runs ending in a final state.
pub fn run_complete(t: &Transducer, x: &[Sym]) -> Result<RunResult> {
    let mut r = Runner::new(t);
    r.feed(x)?;
    r.complete_result()
}
