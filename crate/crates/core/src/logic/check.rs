//! Fixpoint model checking over explicit LTSs.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use super::formula::{Formula, Modality, Var};
use crate::error::LogicError;
use crate::lts::Lts;
use crate::simulation::{weak_successors, WeakClosure};

pub type StateSet = FixedBitSet;

/// Denotation of `phi` over `lts`, with free variables taken from `env`.
pub fn evaluate(lts: &Lts, phi: &Formula, env: &HashMap<Var, StateSet>) -> Result<StateSet, LogicError> {
    if lts.is_truncated() {
        return Err(LogicError::Truncated);
    }
    let mut ev = Evaluator { lts, weak: None, env: env.iter().map(|(k, v)| (k.clone(), v.clone())).collect() };
    ev.eval(phi)
}

/// Whether the initial state satisfies the closed formula `phi`.
pub fn check(lts: &Lts, phi: &Formula) -> Result<bool, LogicError> {
    Ok(check_table(lts, phi)?.contains(lts.initial()))
}

/// The set of all states satisfying the closed formula `phi`.
pub fn check_table(lts: &Lts, phi: &Formula) -> Result<StateSet, LogicError> {
    let free = phi.free_vars();
    if !free.is_empty() {
        return Err(LogicError::FreeVariables(free.into_iter().collect()));
    }
    evaluate(lts, phi, &HashMap::new())
}

struct Evaluator<'a> {
    lts: &'a Lts,
    weak: Option<WeakClosure>,
    env: Vec<(Var, StateSet)>,
}

impl Evaluator<'_> {
    fn n(&self) -> usize {
        self.lts.num_states()
    }

    fn eval(&mut self, phi: &Formula) -> Result<StateSet, LogicError> {
        match phi {
            Formula::Var(z) => self
                .env
                .iter()
                .rev()
                .find(|(v, _)| v == z)
                .map(|(_, s)| s.clone())
                .ok_or_else(|| LogicError::UnboundVariable(z.to_string())),
            Formula::And(l, r) => {
                let mut a = self.eval(l)?;
                a.intersect_with(&self.eval(r)?);
                Ok(a)
            }
            Formula::Or(l, r) => {
                let mut a = self.eval(l)?;
                a.union_with(&self.eval(r)?);
                Ok(a)
            }
            Formula::Modal(kind, labels, body) => {
                let target = self.eval(body)?;
                Ok(self.modal(*kind, labels, &target))
            }
            Formula::Nu(z, body) => {
                let mut full = FixedBitSet::with_capacity(self.n());
                full.insert_range(..);
                self.fixpoint(z, body, full)
            }
            Formula::Mu(z, body) => self.fixpoint(z, body, FixedBitSet::with_capacity(self.n())),
        }
    }

    fn fixpoint(&mut self, z: &Var, body: &Formula, start: StateSet) -> Result<StateSet, LogicError> {
        let mut current = start;
        loop {
            self.env.push((z.clone(), current.clone()));
            let next = self.eval(body);
            self.env.pop();
            let next = next?;
            if next == current {
                return Ok(current);
            }
            current = next;
        }
    }

    fn modal(&mut self, kind: Modality, labels: &super::formula::LabelSet, target: &StateSet) -> StateSet {
        let n = self.n();
        let mut out = FixedBitSet::with_capacity(n);
        match kind {
            Modality::Box | Modality::Diamond => {
                let all = kind == Modality::Box;
                for s in 0..n {
                    let mut hits = self.lts.outgoing(s).iter().filter(|(a, _)| labels.matches_action(a));
                    let ok = if all { hits.all(|(_, t)| target.contains(*t)) } else { hits.any(|(_, t)| target.contains(*t)) };
                    out.set(s, ok);
                }
            }
            Modality::WeakBox | Modality::WeakDiamond => {
                let lts = self.lts;
                let weak = self.weak.get_or_insert_with(|| weak_successors(lts));
                let all = kind == Modality::WeakBox;
                let eps = labels.includes_eps();
                for s in 0..n {
                    let mut sets = std::iter::once(eps.then(|| weak.eps(s)))
                        .flatten()
                        .chain(weak.weak_moves(s).filter(|(a, _)| labels.matches_action(a)).map(|(_, ts)| ts));
                    let ok = if all {
                        sets.all(|ts| ts.is_subset(target))
                    } else {
                        sets.any(|ts| !ts.is_disjoint(target))
                    };
                    out.set(s, ok);
                }
            }
        }
        out
    }
}
