//! Structural operational semantics: single-step transitions of a term.

use std::collections::HashSet;

use crate::action::{Action, Label};
use crate::error::CcsError;
use crate::process::{Family, Process};

/// All single-step transitions `e --α--> e'`, deduplicated, in derivation
/// order (left operand before right, synchronisations last).
///
/// Unguarded recursion through choice alone contributes nothing beyond the
/// moves already derivable (least solution). Unguarded recursion through a
/// static operator yields infinitely many derivations and is an error.
pub fn successors(family: &Family, e: &Process) -> Result<Vec<(Action, Process)>, CcsError> {
    let mut unfolding = Vec::new();
    let moves = derive(family, e, 0, &mut unfolding)?;
    let mut seen = HashSet::with_capacity(moves.len());
    Ok(moves.into_iter().filter(|m| seen.insert(m.clone())).collect())
}

/// The state identity of a term: constants whose definition is a static
/// operator (`|`, `\L`, `[f]`, `\\L`) are unfolded wherever they sit in the
/// static part of the term. Such bodies reappear verbatim as transition
/// targets, so folding them would count one configuration twice.
pub fn canonical_state(family: &Family, e: &Process) -> Process {
    let mut seen = Vec::new();
    canonical_in(family, e, &mut seen)
}

fn canonical_in(family: &Family, e: &Process, seen: &mut Vec<Label>) -> Process {
    match e {
        Process::Const(name) => match family.get(name) {
            Some(body) if is_static(body) && !seen.contains(name) => {
                seen.push(name.clone());
                let r = canonical_in(family, body, seen);
                seen.pop();
                r
            }
            _ => e.clone(),
        },
        Process::Par(..) | Process::Restrict(..) | Process::Relabel(..) | Process::Hide(..) => {
            e.map_children(|c| canonical_in(family, c, seen))
        }
        _ => e.clone(),
    }
}

fn is_static(p: &Process) -> bool {
    matches!(p, Process::Par(..) | Process::Restrict(..) | Process::Relabel(..) | Process::Hide(..))
}

fn derive(
    family: &Family,
    e: &Process,
    static_depth: usize,
    unfolding: &mut Vec<(Label, usize)>,
) -> Result<Vec<(Action, Process)>, CcsError> {
    Ok(match e {
        Process::Nil => vec![],
        Process::Prefix(a, body) => vec![(a.clone(), (**body).clone())],
        Process::Const(name) => {
            if let Some(&(_, depth)) = unfolding.iter().find(|(n, _)| n == name) {
                if static_depth > depth {
                    return Err(CcsError::UnguardedRecursion(name.to_string()));
                }
                return Ok(vec![]);
            }
            let body = family.lookup(name)?;
            unfolding.push((name.clone(), static_depth));
            let r = derive(family, body, static_depth, unfolding);
            unfolding.pop();
            r?
        }
        Process::Sum(cs) => {
            let mut out = Vec::new();
            for c in cs.iter() {
                out.extend(derive(family, c, static_depth, unfolding)?);
            }
            out
        }
        Process::Par(l, r) => {
            let lm = derive(family, l, static_depth + 1, unfolding)?;
            let rm = derive(family, r, static_depth + 1, unfolding)?;
            let mut out = Vec::with_capacity(lm.len() + rm.len());
            for (a, l2) in &lm {
                out.push((a.clone(), Process::Par(l2.clone().into(), r.clone())));
            }
            for (a, r2) in &rm {
                out.push((a.clone(), Process::Par(l.clone(), r2.clone().into())));
            }
            for (a, l2) in &lm {
                for (b, r2) in &rm {
                    if a.is_complement_of(b) {
                        out.push((Action::Tau, Process::par(l2.clone(), r2.clone())));
                    }
                }
            }
            out
        }
        Process::Restrict(body, set) => derive(family, body, static_depth + 1, unfolding)?
            .into_iter()
            .filter(|(a, _)| !set.contains(a))
            .map(|(a, b)| (a, Process::restrict(b, set.clone())))
            .collect(),
        Process::Relabel(body, f) => derive(family, body, static_depth + 1, unfolding)?
            .into_iter()
            .map(|(a, b)| (f.apply(&a), Process::relabel(b, f.clone())))
            .collect(),
        Process::Hide(body, set) => derive(family, body, static_depth + 1, unfolding)?
            .into_iter()
            .map(|(a, b)| {
                let a = if set.contains(&a) { Action::Tau } else { a };
                (a, Process::hide(b, set.clone()))
            })
            .collect(),
    })
}
