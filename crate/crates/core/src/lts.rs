//! Explicit labelled transition systems.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::action::Action;
use crate::error::CcsError;
use crate::process::{sort, Family, Process};
use crate::semantics::{canonical_state, successors};

pub const DEFAULT_MAX_STATES: usize = 1_000_000;

/// A finite LTS whose states are canonical process terms numbered in
/// breadth-first discovery order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lts {
    states: Vec<Process>,
    out: Vec<Vec<(Action, usize)>>,
    initial: usize,
    truncated: bool,
    alphabet: BTreeSet<Action>,
}

impl Lts {
    /// An LTS given directly by its transitions. States are named `s0`, `s1`, ...
    pub fn explicit(num_states: usize, transitions: &[(usize, Action, usize)], initial: usize) -> Lts {
        assert!(initial < num_states.max(1), "initial state out of range");
        let n = num_states.max(1);
        let mut out = vec![Vec::new(); n];
        let mut alphabet = BTreeSet::new();
        for (s, a, t) in transitions {
            assert!(*s < n && *t < n, "transition endpoint out of range");
            if !out[*s].contains(&(a.clone(), *t)) {
                out[*s].push((a.clone(), *t));
            }
            if !a.is_tau() {
                alphabet.insert(a.clone());
                alphabet.insert(a.complement().unwrap());
            }
        }
        Lts {
            states: (0..n).map(|i| Process::constant(&format!("s{i}"))).collect(),
            out,
            initial,
            truncated: false,
            alphabet,
        }
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn state(&self, i: usize) -> &Process {
        &self.states[i]
    }

    pub fn states(&self) -> &[Process] {
        &self.states
    }

    pub fn outgoing(&self, s: usize) -> &[(Action, usize)] {
        &self.out[s]
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, &Action, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(s, ts)| ts.iter().map(move |(a, t)| (s, a, *t)))
    }

    /// The closed-world action universe: the sort of the source family, or the
    /// labels seen on transitions for explicit systems. Never contains τ.
    pub fn alphabet(&self) -> &BTreeSet<Action> {
        &self.alphabet
    }
}

/// Breadth-first reachable LTS from the root constant. States are identified
/// up to [`canonical_state`].
///
/// Stops as soon as more than `max_states` states would be needed and flags
/// the result as truncated; checkers refuse truncated systems.
pub fn build_lts(family: &Family, max_states: usize) -> Result<Lts, CcsError> {
    if max_states == 0 {
        return Err(CcsError::ZeroStateBound);
    }
    let init = canonical_state(family, &Process::Const(family.root().clone()));
    let mut index: HashMap<Process, usize> = HashMap::new();
    let mut states = vec![init.clone()];
    let mut out: Vec<Vec<(Action, usize)>> = vec![Vec::new()];
    index.insert(init, 0);
    let mut queue = VecDeque::from([0usize]);
    let mut truncated = false;

    'explore: while let Some(s) = queue.pop_front() {
        let moves = successors(family, &states[s])?;
        let mut edges = Vec::with_capacity(moves.len());
        for (a, target) in moves {
            let target = canonical_state(family, &target);
            let t = match index.get(&target) {
                Some(&t) => t,
                None => {
                    if states.len() >= max_states {
                        truncated = true;
                        out[s] = edges;
                        break 'explore;
                    }
                    let t = states.len();
                    index.insert(target.clone(), t);
                    states.push(target);
                    out.push(Vec::new());
                    queue.push_back(t);
                    t
                }
            };
            edges.push((a, t));
        }
        out[s] = edges;
    }

    Ok(Lts { states, out, initial: 0, truncated, alphabet: sort(family) })
}
