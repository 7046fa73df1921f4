//! Process expressions and definition families.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::sync::Arc;

use indexmap::IndexMap;

use crate::action::{label, Action, ActionSet, Label, Relabelling};
use crate::error::CcsError;

/// A CCS process term.
///
/// Terms built through the constructor functions are canonical: a `Sum`
/// never has a `Sum` child and always has at least two children. Child order
/// is kept as written.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Process {
    Const(Label),
    Nil,
    Prefix(Action, Arc<Process>),
    Sum(Arc<[Process]>),
    Par(Arc<Process>, Arc<Process>),
    Restrict(Arc<Process>, ActionSet),
    Relabel(Arc<Process>, Relabelling),
    Hide(Arc<Process>, ActionSet),
}

impl Process {
    pub fn constant(name: &str) -> Self {
        Process::Const(label(name))
    }

    pub fn prefix(a: Action, body: Process) -> Self {
        Process::Prefix(a, Arc::new(body))
    }

    /// Flattening n-ary choice. An empty choice is `0`; a singleton is its child.
    pub fn sum<I: IntoIterator<Item = Process>>(children: I) -> Self {
        let mut flat = Vec::new();
        for c in children {
            match c {
                Process::Sum(cs) => flat.extend(cs.iter().cloned()),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Process::Nil,
            1 => flat.pop().unwrap(),
            _ => Process::Sum(flat.into()),
        }
    }

    pub fn par(left: Process, right: Process) -> Self {
        Process::Par(Arc::new(left), Arc::new(right))
    }

    pub fn restrict(body: Process, set: ActionSet) -> Self {
        Process::Restrict(Arc::new(body), set)
    }

    pub fn relabel(body: Process, f: Relabelling) -> Self {
        Process::Relabel(Arc::new(body), f)
    }

    pub fn hide(body: Process, set: ActionSet) -> Self {
        Process::Hide(Arc::new(body), set)
    }

    /// Immediate subterms in path order.
    pub fn children(&self) -> Vec<&Process> {
        match self {
            Process::Const(_) | Process::Nil => vec![],
            Process::Prefix(_, b) | Process::Restrict(b, _) | Process::Relabel(b, _) | Process::Hide(b, _) => {
                vec![b]
            }
            Process::Sum(cs) => cs.iter().collect(),
            Process::Par(l, r) => vec![l, r],
        }
    }

    pub fn child(&self, i: usize) -> Option<&Process> {
        match self {
            Process::Const(_) | Process::Nil => None,
            Process::Prefix(_, b) | Process::Restrict(b, _) | Process::Relabel(b, _) | Process::Hide(b, _) => {
                (i == 0).then_some(&**b)
            }
            Process::Sum(cs) => cs.get(i),
            Process::Par(l, r) => match i {
                0 => Some(l),
                1 => Some(r),
                _ => None,
            },
        }
    }

    /// Rebuilds `self` with child `i` replaced. The result is re-canonicalised,
    /// so replacing a choice branch by a choice flattens it.
    pub fn with_child(&self, i: usize, new: Process) -> Option<Process> {
        Some(match self {
            Process::Const(_) | Process::Nil => return None,
            Process::Prefix(a, _) if i == 0 => Process::prefix(a.clone(), new),
            Process::Restrict(_, s) if i == 0 => Process::restrict(new, s.clone()),
            Process::Relabel(_, f) if i == 0 => Process::relabel(new, f.clone()),
            Process::Hide(_, s) if i == 0 => Process::hide(new, s.clone()),
            Process::Sum(cs) if i < cs.len() => {
                let mut v: Vec<Process> = cs.to_vec();
                v[i] = new;
                Process::sum(v)
            }
            Process::Par(_, r) if i == 0 => Process::Par(Arc::new(new), r.clone()),
            Process::Par(l, _) if i == 1 => Process::Par(l.clone(), Arc::new(new)),
            _ => return None,
        })
    }

    /// Applies `f` to every child, rebuilding canonically.
    pub fn map_children(&self, mut f: impl FnMut(&Process) -> Process) -> Process {
        match self {
            Process::Const(_) | Process::Nil => self.clone(),
            Process::Prefix(a, b) => Process::prefix(a.clone(), f(b)),
            Process::Sum(cs) => Process::sum(cs.iter().map(f)),
            Process::Par(l, r) => Process::par(f(l), f(r)),
            Process::Restrict(b, s) => Process::restrict(f(b), s.clone()),
            Process::Relabel(b, r) => Process::relabel(f(b), r.clone()),
            Process::Hide(b, s) => Process::hide(f(b), s.clone()),
        }
    }

    /// Bottom-up rewrite of every node.
    pub fn transform(&self, f: &mut impl FnMut(Process) -> Process) -> Process {
        let rebuilt = self.map_children(|c| c.transform(f));
        f(rebuilt)
    }

    pub fn constants(&self) -> BTreeSet<Label> {
        let mut out = BTreeSet::new();
        self.collect_constants(&mut out);
        out
    }

    fn collect_constants(&self, out: &mut BTreeSet<Label>) {
        if let Process::Const(n) = self {
            out.insert(n.clone());
        }
        for c in self.children() {
            c.collect_constants(out);
        }
    }

    pub fn rename_constant(&self, from: &str, to: &Label) -> Process {
        self.transform(&mut |p| match p {
            Process::Const(n) if &*n == from => Process::Const(to.clone()),
            other => other,
        })
    }

    pub fn is_canonical(&self) -> bool {
        let here = match self {
            Process::Sum(cs) => cs.len() >= 2 && cs.iter().all(|c| !matches!(c, Process::Sum(_))),
            _ => true,
        };
        here && self.children().iter().all(|c| c.is_canonical())
    }

    fn collect_sort(&self, out: &mut BTreeSet<Action>) {
        let mut add = |l: &Label| {
            out.insert(Action::Name(l.clone()));
            out.insert(Action::CoName(l.clone()));
        };
        match self {
            Process::Prefix(a, _) => {
                if let Some(l) = a.label() {
                    add(l);
                }
            }
            Process::Restrict(_, s) | Process::Hide(_, s) => s.labels().iter().for_each(add),
            Process::Relabel(_, f) => f.range().for_each(add),
            _ => {}
        }
        for c in self.children() {
            c.collect_sort(out);
        }
    }

    /// Constant occurrences not under any prefix, with a flag telling whether
    /// the occurrence sits under a static operator (`|`, `\L`, `[f]`, `\\L`).
    pub fn unguarded_constants(&self) -> Vec<(Label, bool)> {
        fn go(p: &Process, under_static: bool, out: &mut Vec<(Label, bool)>) {
            match p {
                Process::Const(n) => out.push((n.clone(), under_static)),
                Process::Nil | Process::Prefix(..) => {}
                Process::Sum(cs) => cs.iter().for_each(|c| go(c, under_static, out)),
                Process::Par(l, r) => {
                    go(l, true, out);
                    go(r, true, out);
                }
                Process::Restrict(b, _) | Process::Relabel(b, _) | Process::Hide(b, _) => go(b, true, out),
            }
        }
        let mut out = Vec::new();
        go(self, false, &mut out);
        out
    }
}

/// A family of recursive constant definitions with a distinguished root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    defs: IndexMap<Label, Process>,
    root: Label,
}

impl Family {
    /// Checks that the root and every referenced constant are defined.
    pub fn new(defs: IndexMap<Label, Process>, root: &str) -> Result<Self, CcsError> {
        let fam = Family { defs, root: label(root) };
        fam.validate()?;
        Ok(fam)
    }

    pub fn from_defs<I, S>(defs: I, root: &str) -> Result<Self, CcsError>
    where
        I: IntoIterator<Item = (S, Process)>,
        S: AsRef<str>,
    {
        Family::new(defs.into_iter().map(|(n, p)| (label(n.as_ref()), p)).collect(), root)
    }

    pub fn validate(&self) -> Result<(), CcsError> {
        if !self.defs.contains_key(&self.root) {
            return Err(CcsError::MissingRoot(self.root.to_string()));
        }
        for body in self.defs.values() {
            for c in body.constants() {
                if !self.defs.contains_key(&c) {
                    return Err(CcsError::UndefinedConstant(c.to_string()));
                }
            }
        }
        Ok(())
    }

    pub fn root(&self) -> &Label {
        &self.root
    }

    pub fn with_root(&self, root: &str) -> Result<Family, CcsError> {
        Family::new(self.defs.clone(), root)
    }

    pub fn defs(&self) -> &IndexMap<Label, Process> {
        &self.defs
    }

    pub fn get(&self, name: &str) -> Option<&Process> {
        self.defs.get(name)
    }

    pub fn lookup(&self, name: &str) -> Result<&Process, CcsError> {
        self.defs.get(name).ok_or_else(|| CcsError::UndefinedConstant(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.defs.contains_key(name)
    }

    /// Replaces (or appends) a definition without re-validating.
    pub(crate) fn set_def(&mut self, name: Label, body: Process) {
        self.defs.insert(name, body);
    }

    /// Inserts a new definition directly after `after` (or last).
    pub(crate) fn insert_def_after(&mut self, after: &str, name: Label, body: Process) {
        let at = self.defs.get_index_of(after).map_or(self.defs.len(), |i| i + 1);
        self.defs.shift_insert(at, name, body);
    }

    pub(crate) fn remove_def(&mut self, name: &str) -> Option<Process> {
        self.defs.shift_remove(name)
    }

    /// Renames a constant everywhere, keeping its slot in definition order.
    pub(crate) fn rename(&mut self, from: &str, to: &Label) {
        let defs = std::mem::take(&mut self.defs);
        self.defs = defs
            .into_iter()
            .map(|(n, b)| {
                let n = if &*n == from { to.clone() } else { n };
                (n, b.rename_constant(from, to))
            })
            .collect();
        if &*self.root == from {
            self.root = to.clone();
        }
    }

    /// A name not yet defined, `base` itself when free, else `base_1`, `base_2`, ...
    pub fn fresh_name(&self, base: &str) -> Label {
        if !self.contains(base) {
            return label(base);
        }
        (1..)
            .map(|i| format!("{base}_{i}"))
            .find(|n| !self.contains(n))
            .map(|n| label(&n))
            .unwrap()
    }

    /// Constants reachable from `from` through definition bodies, in BFS order.
    pub fn reachable_constants(&self, from: &str) -> Vec<Label> {
        let mut seen = HashSet::new();
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        if let Some((k, _)) = self.defs.get_key_value(from) {
            seen.insert(k.clone());
            queue.push_back(k.clone());
        }
        while let Some(n) = queue.pop_front() {
            order.push(n.clone());
            if let Some(body) = self.defs.get(&n) {
                for c in body.constants() {
                    if seen.insert(c.clone()) {
                        queue.push_back(c);
                    }
                }
            }
        }
        order
    }

    /// Drops definitions unreachable from the root.
    pub(crate) fn retain_reachable(&mut self) {
        let keep: HashSet<Label> = self.reachable_constants(&self.root).into_iter().collect();
        self.defs.retain(|k, _| keep.contains(k));
    }

    /// A constant that can reach itself through unguarded occurrences with at
    /// least one of them under a static operator. Such definitions have
    /// infinitely many derivations and no finite LTS.
    pub fn static_unguarded_cycle(&self) -> Option<Label> {
        let edges: Vec<Vec<(usize, bool)>> = self
            .defs
            .values()
            .map(|b| {
                b.unguarded_constants()
                    .into_iter()
                    .filter_map(|(c, st)| self.defs.get_index_of(&c).map(|i| (i, st)))
                    .collect()
            })
            .collect();
        let reaches = |from: usize, to: usize| {
            let mut seen = vec![false; edges.len()];
            let mut stack = vec![from];
            while let Some(u) = stack.pop() {
                if u == to {
                    return true;
                }
                if !std::mem::replace(&mut seen[u], true) {
                    stack.extend(edges[u].iter().map(|e| e.0));
                }
            }
            false
        };
        for (u, es) in edges.iter().enumerate() {
            for &(v, st) in es {
                if st && reaches(v, u) {
                    return self.defs.get_index(u).map(|(k, _)| k.clone());
                }
            }
        }
        None
    }

    /// True when `to` is `from` or reachable from it through unguarded
    /// occurrences.
    pub(crate) fn unguarded_reaches(&self, from: &str, to: &str) -> bool {
        let mut seen = HashSet::new();
        let mut stack = vec![label(from)];
        while let Some(u) = stack.pop() {
            if &*u == to {
                return true;
            }
            if seen.insert(u.clone()) {
                if let Some(b) = self.defs.get(&u) {
                    stack.extend(b.unguarded_constants().into_iter().map(|(c, _)| c));
                }
            }
        }
        false
    }

    /// True when some constant can reach itself through unguarded occurrences only.
    pub fn has_unguarded_cycle(&self) -> bool {
        // Kahn-style elimination on the unguarded dependency graph.
        let names: Vec<&Label> = self.defs.keys().collect();
        let edges: Vec<Vec<usize>> = self
            .defs
            .values()
            .map(|b| {
                b.unguarded_constants()
                    .into_iter()
                    .filter_map(|(c, _)| self.defs.get_index_of(&c))
                    .collect()
            })
            .collect();
        let mut indeg = vec![0usize; names.len()];
        for es in &edges {
            for &t in es {
                indeg[t] += 1;
            }
        }
        let mut stack: Vec<usize> = (0..names.len()).filter(|&i| indeg[i] == 0).collect();
        let mut removed = 0;
        while let Some(i) = stack.pop() {
            removed += 1;
            for &t in &edges[i] {
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    stack.push(t);
                }
            }
        }
        removed < names.len()
    }
}

/// The non-τ actions occurring syntactically in the family, closed under
/// complement: prefixes, restriction and hiding sets, relabelling ranges.
pub fn sort(family: &Family) -> BTreeSet<Action> {
    let mut out = BTreeSet::new();
    for body in family.defs.values() {
        body.collect_sort(&mut out);
    }
    out
}
