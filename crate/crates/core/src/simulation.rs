//! Weak transitions and the weak simulation preorder.

use std::collections::{BTreeMap, HashMap, VecDeque};

use fixedbitset::FixedBitSet;

use crate::action::Action;
use crate::error::SimulationError;
use crate::lts::{build_lts, Lts};
use crate::process::Family;

/// Per state: the reflexive τ* closure, and for each visible action `a` the
/// states reachable by `⇒ε →a ⇒ε`.
#[derive(Clone, Debug)]
pub struct WeakClosure {
    eps: Vec<FixedBitSet>,
    weak: Vec<BTreeMap<Action, FixedBitSet>>,
}

impl WeakClosure {
    pub fn num_states(&self) -> usize {
        self.eps.len()
    }

    pub fn eps(&self, s: usize) -> &FixedBitSet {
        &self.eps[s]
    }

    /// Weak `a`-successors of `s`, or `None` when there are none.
    pub fn weak(&self, s: usize, a: &Action) -> Option<&FixedBitSet> {
        self.weak[s].get(a)
    }

    /// Visible actions with at least one weak successor, with those successors.
    pub fn weak_moves(&self, s: usize) -> impl Iterator<Item = (&Action, &FixedBitSet)> {
        self.weak[s].iter()
    }
}

pub fn weak_successors(lts: &Lts) -> WeakClosure {
    let n = lts.num_states();
    let mut eps = Vec::with_capacity(n);
    for s in 0..n {
        let mut seen = FixedBitSet::with_capacity(n);
        seen.insert(s);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for (a, t) in lts.outgoing(u) {
                if a.is_tau() && !seen.put(*t) {
                    queue.push_back(*t);
                }
            }
        }
        eps.push(seen);
    }
    let mut weak = Vec::with_capacity(n);
    for s in 0..n {
        let mut moves: BTreeMap<Action, FixedBitSet> = BTreeMap::new();
        for u in eps[s].ones() {
            for (a, t) in lts.outgoing(u) {
                if !a.is_tau() {
                    moves
                        .entry(a.clone())
                        .or_insert_with(|| FixedBitSet::with_capacity(n))
                        .union_with(&eps[*t]);
                }
            }
        }
        weak.push(moves);
    }
    WeakClosure { eps, weak }
}

/// A relation between the states of a left and a right LTS.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimWitness {
    pub pairs: Vec<(usize, usize)>,
}

impl SimWitness {
    pub fn contains(&self, p: usize, q: usize) -> bool {
        self.pairs.binary_search(&(p, q)).is_ok()
    }
}

#[derive(Clone, Debug)]
pub struct SimResult {
    pub holds: bool,
    /// The greatest weak simulation, present when `holds`.
    pub witness: Option<SimWitness>,
}

/// Decides whether the initial state of `left` is weakly simulated by the
/// initial state of `right`, by refining the full product down to the
/// greatest weak simulation.
pub fn weakly_simulated_by(left: &Lts, right: &Lts) -> Result<SimResult, SimulationError> {
    if left.is_truncated() || right.is_truncated() {
        return Err(SimulationError::Truncated);
    }
    let lw = weak_successors(left);
    let rw = weak_successors(right);
    let rel = greatest_weak_simulation(&lw, &rw);
    let holds = rel[left.initial()].contains(right.initial());
    let witness = holds.then(|| SimWitness {
        pairs: rel.iter().enumerate().flat_map(|(p, row)| row.ones().map(move |q| (p, q))).collect(),
    });
    Ok(SimResult { holds, witness })
}

fn greatest_weak_simulation(lw: &WeakClosure, rw: &WeakClosure) -> Vec<FixedBitSet> {
    let (n, m) = (lw.num_states(), rw.num_states());
    let mut rel: Vec<FixedBitSet> = (0..n)
        .map(|_| {
            let mut row = FixedBitSet::with_capacity(m);
            row.insert_range(..);
            row
        })
        .collect();
    loop {
        let mut changed = false;
        for p in 0..n {
            let doomed: Vec<usize> = rel[p].ones().filter(|&q| !transfers(lw, rw, &rel, p, q)).collect();
            for q in doomed {
                rel[p].set(q, false);
                changed = true;
            }
        }
        if !changed {
            return rel;
        }
    }
}

/// Every weak move of `p` (ε included) is matched by a weak move of `q`
/// with the same label into a related pair.
fn transfers(lw: &WeakClosure, rw: &WeakClosure, rel: &[FixedBitSet], p: usize, q: usize) -> bool {
    let matched = |targets: &FixedBitSet, answers: Option<&FixedBitSet>| {
        targets.ones().all(|p2| answers.is_some_and(|a| !rel[p2].is_disjoint(a)))
    };
    if !matched(lw.eps(p), Some(rw.eps(q))) {
        return false;
    }
    lw.weak_moves(p).all(|(a, targets)| matched(targets, rw.weak(q, a)))
}

/// Independent check that `witness` is a weak simulation containing the
/// initial pair.
pub fn audit_witness(left: &Lts, right: &Lts, witness: &SimWitness) -> bool {
    let lw = weak_successors(left);
    let rw = weak_successors(right);
    if !witness.contains(left.initial(), right.initial()) {
        return false;
    }
    witness.pairs.iter().all(|&(p, q)| {
        let answer = |p2: usize, qs: Option<&FixedBitSet>| qs.is_some_and(|qs| qs.ones().any(|q2| witness.contains(p2, q2)));
        lw.eps(p).ones().all(|p2| answer(p2, Some(rw.eps(q))))
            && lw.weak_moves(p).all(|(a, ts)| ts.ones().all(|p2| answer(p2, rw.weak(q, a))))
    })
}

/// Certifies one abstraction step: the root of `before` is weakly simulated
/// by the root of `after`.
pub fn verify_step(before: &Family, after: &Family, max_states: usize) -> Result<bool, SimulationError> {
    let l = build_lts(before, max_states)?;
    let r = build_lts(after, max_states)?;
    Ok(weakly_simulated_by(&l, &r)?.holds)
}

/// Number of strong-bisimulation classes among the states of `lts`. A
/// diagnostic only; state identity never depends on it.
pub fn minimized_state_count(lts: &Lts) -> usize {
    let n = lts.num_states();
    let mut action_ids: HashMap<&Action, usize> = HashMap::new();
    for (_, a, _) in lts.transitions() {
        let next = action_ids.len();
        action_ids.entry(a).or_insert(next);
    }
    let mut block = vec![0usize; n];
    let mut count = 1;
    loop {
        let mut sigs: HashMap<(usize, Vec<(usize, usize)>), usize> = HashMap::new();
        let mut next = vec![0usize; n];
        for s in 0..n {
            let mut sig: Vec<(usize, usize)> = lts.outgoing(s).iter().map(|(a, t)| (action_ids[a], block[*t])).collect();
            sig.sort_unstable();
            sig.dedup();
            let fresh = sigs.len();
            next[s] = *sigs.entry((block[s], sig)).or_insert(fresh);
        }
        let new_count = sigs.len();
        block = next;
        if new_count == count {
            return count;
        }
        count = new_count;
    }
}
