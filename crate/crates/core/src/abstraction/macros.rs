//! Multi-step rewrites: pushing hiding or relabelling through whole
//! definitions, and exhaustive τ removal.

use std::collections::HashMap;

use crate::action::{label, Action, ActionSet, Label, Relabelling};
use crate::error::AbstractionError;
use crate::frontend::Path;
use crate::process::{Family, Process};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Op {
    Hide,
    Relabel,
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Wrapper {
    Hide(ActionSet),
    Relabel(Relabelling),
}

impl Wrapper {
    fn apply(&self, e: Process) -> Process {
        match self {
            Wrapper::Hide(k) => Process::hide(e, k.clone()),
            Wrapper::Relabel(f) => Process::relabel(e, f.clone()),
        }
    }

    fn suffix(&self) -> &'static str {
        match self {
            Wrapper::Hide(_) => "h",
            Wrapper::Relabel(_) => "r",
        }
    }

    /// Whether the wrapper commutes with an inner restriction or hiding on `l`.
    fn passes(&self, l: &ActionSet) -> bool {
        match self {
            Wrapper::Hide(k) => k.is_disjoint(l),
            Wrapper::Relabel(f) => f.map().iter().all(|(old, new)| !l.contains_label(old) && !l.contains_label(new)),
        }
    }
}

struct Pusher<'a> {
    family: &'a Family,
    copies: HashMap<(Label, Wrapper), Label>,
    added: Vec<(Label, Label, Process)>,
    chain: Vec<String>,
}

impl Pusher<'_> {
    fn taken(&self, n: &str) -> bool {
        self.family.contains(n) || self.added.iter().any(|(_, m, _)| &**m == n)
    }

    fn fresh(&self, base: &str) -> Label {
        if !self.taken(base) {
            return label(base);
        }
        (1..).map(|i| format!("{base}_{i}")).find(|n| !self.taken(n)).map(|n| label(&n)).unwrap()
    }

    fn push(&mut self, e: &Process, w: &Wrapper) -> Process {
        let (rule_prefix, rule_sum, rule_par) = match w {
            Wrapper::Hide(_) => ("hide-prefix", "hide-sum", "hide-par"),
            Wrapper::Relabel(_) => ("relabel-prefix", "relabel-sum", "relabel-par"),
        };
        match e {
            Process::Nil => {
                self.chain.push("drop-nil-wrapper".into());
                Process::Nil
            }
            Process::Prefix(a, body) => {
                let a2 = match w {
                    Wrapper::Hide(k) if k.contains(a) => {
                        self.chain.push(rule_prefix.into());
                        Action::Tau
                    }
                    Wrapper::Hide(_) => {
                        self.chain.push("hide-through-prefix".into());
                        a.clone()
                    }
                    Wrapper::Relabel(f) => {
                        self.chain.push(rule_prefix.into());
                        f.apply(a)
                    }
                };
                Process::prefix(a2, self.push(body, w))
            }
            Process::Sum(cs) => {
                self.chain.push(rule_sum.into());
                Process::sum(cs.iter().map(|c| self.push(c, w)).collect::<Vec<_>>())
            }
            Process::Par(l, r) => {
                self.chain.push(rule_par.into());
                let l = self.push(l, w);
                let r = self.push(r, w);
                Process::par(l, r)
            }
            Process::Restrict(body, l) if w.passes(l) => {
                self.chain.push("wrapper-through-restriction".into());
                Process::restrict(self.push(body, w), l.clone())
            }
            Process::Hide(body, l) if matches!(w, Wrapper::Relabel(_)) && w.passes(l) => {
                self.chain.push("relabel-through-hiding".into());
                Process::hide(self.push(body, w), l.clone())
            }
            Process::Const(a) => {
                let key = (a.clone(), w.clone());
                if let Some(n) = self.copies.get(&key) {
                    self.chain.push(format!("fold {n}"));
                    return Process::Const(n.clone());
                }
                let name = self.fresh(&format!("{a}_{}", w.suffix()));
                self.copies.insert(key, name.clone());
                self.chain.push(format!("unfold {a}"));
                // Nested wrappers reach copies made by an inner push.
                let body = match self.family.get(a) {
                    Some(b) => b.clone(),
                    None => self.added.iter().find(|(_, m, _)| m == a).map(|(_, _, b)| b.clone()).expect("validated family"),
                };
                let slot = self.added.len();
                self.added.push((a.clone(), name.clone(), Process::Nil));
                let pushed = self.push(&body, w);
                self.added[slot].2 = pushed;
                self.chain.push(format!("fold {name}"));
                Process::Const(name)
            }
            _ => w.apply(e.clone()),
        }
    }

    /// Replaces every matching wrapper node in `e`, innermost first.
    fn push_all(&mut self, e: &Process, op: Op) -> Process {
        let rebuilt = e.map_children(|c| self.push_all(c, op));
        match (&rebuilt, op) {
            (Process::Hide(body, k), Op::Hide) => {
                let w = Wrapper::Hide(k.clone());
                let body = (**body).clone();
                self.push(&body, &w)
            }
            (Process::Relabel(body, f), Op::Relabel) => {
                let w = Wrapper::Relabel(f.clone());
                let body = (**body).clone();
                self.push(&body, &w)
            }
            _ => rebuilt,
        }
    }
}

/// Pushes every hiding (or relabelling) operator inside `target`, or inside
/// every definition, down to the prefixes, copying constants on the way.
/// Definitions no longer reachable from the root are dropped, and copies
/// take back the names of originals that were dropped.
pub(crate) fn push(family: &Family, target: Option<&Path>, op: Op) -> Result<(Family, Vec<String>), AbstractionError> {
    let mut p = Pusher { family, copies: HashMap::new(), added: Vec::new(), chain: Vec::new() };
    let mut out = family.clone();
    match target {
        Some(t) => {
            let node = t.resolve(family)?;
            let new = p.push_all(node, op);
            out = t.replace(&out, new)?;
        }
        None => {
            for (name, body) in family.defs() {
                let new = p.push_all(body, op);
                out.set_def(name.clone(), new);
            }
        }
    }
    if p.chain.is_empty() {
        return Ok((out, vec![]));
    }
    let added = std::mem::take(&mut p.added);
    let chain = std::mem::take(&mut p.chain);
    for (after, name, body) in added {
        out.insert_def_after(&after, name, body);
    }
    out.retain_reachable();
    // Copies of copies come from nested wrappers; follow them to the source.
    let origin: HashMap<Label, Label> = p.copies.iter().map(|((orig, _), copy)| (copy.clone(), orig.clone())).collect();
    let mut renames: Vec<(Vec<Label>, Label)> = origin
        .keys()
        .filter(|copy| out.contains(copy))
        .map(|copy| {
            let mut chain = vec![];
            let mut cur = copy;
            while let Some(o) = origin.get(cur) {
                chain.push(o.clone());
                cur = o;
            }
            chain.reverse();
            (chain, copy.clone())
        })
        .collect();
    renames.sort();
    for (candidates, copy) in renames {
        // Two copies of one original: only the first gets the name back.
        if let Some(name) = candidates.into_iter().find(|n| !out.contains(n)) {
            out.rename(&copy, &name);
        }
    }
    Ok((out, chain))
}

/// Applies `τ.E ⟶ E` everywhere inside `target` or the whole family.
pub(crate) fn remove_tau_all(family: &Family, target: Option<&Path>) -> Result<(Family, Vec<String>), AbstractionError> {
    let mut count = 0usize;
    let mut strip = |e: &Process| {
        e.transform(&mut |p| match p {
            Process::Prefix(Action::Tau, body) => {
                count += 1;
                (*body).clone()
            }
            other => other,
        })
    };
    let out = match target {
        Some(t) => {
            let new = strip(t.resolve(family)?);
            t.replace(family, new)?
        }
        None => {
            let mut out = family.clone();
            for (name, body) in family.defs() {
                out.set_def(name.clone(), strip(body));
            }
            out
        }
    };
    Ok((out, vec!["drop-tau".to_string(); count]))
}
