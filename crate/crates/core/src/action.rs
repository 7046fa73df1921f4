//! Actions, action sets and relabelling functions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::CcsError;

/// A channel label. Names and co-names share labels; `a` and `'a` both carry `a`.
pub type Label = Arc<str>;

pub fn label(s: &str) -> Label {
    Arc::from(s)
}

/// An element of the CCS action alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Tau,
    Name(Label),
    CoName(Label),
}

impl Action {
    pub fn name(s: &str) -> Self {
        Action::Name(label(s))
    }

    pub fn coname(s: &str) -> Self {
        Action::CoName(label(s))
    }

    pub fn is_tau(&self) -> bool {
        matches!(self, Action::Tau)
    }

    pub fn label(&self) -> Option<&Label> {
        match self {
            Action::Tau => None,
            Action::Name(l) | Action::CoName(l) => Some(l),
        }
    }

    pub fn complement(&self) -> Result<Action, CcsError> {
        match self {
            Action::Tau => Err(CcsError::TauComplement),
            Action::Name(l) => Ok(Action::CoName(l.clone())),
            Action::CoName(l) => Ok(Action::Name(l.clone())),
        }
    }

    /// True when `self` and `other` can synchronise into a τ.
    pub fn is_complement_of(&self, other: &Action) -> bool {
        match (self, other) {
            (Action::Name(a), Action::CoName(b)) | (Action::CoName(a), Action::Name(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Tau => f.write_str("tau"),
            Action::Name(l) => write!(f, "{l}"),
            Action::CoName(l) => write!(f, "'{l}"),
        }
    }
}

/// A set of non-τ actions, given by labels. Membership is always read as
/// `L ∪ L̄`: a label stands for both its name and its co-name, so every set
/// is closed under complement.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ActionSet(Arc<BTreeSet<Label>>);

impl ActionSet {
    pub fn new<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        ActionSet(Arc::new(labels.into_iter().map(|s| label(s.as_ref())).collect()))
    }

    pub fn from_labels(labels: BTreeSet<Label>) -> Self {
        ActionSet(Arc::new(labels))
    }

    pub fn labels(&self) -> &BTreeSet<Label> {
        &self.0
    }

    pub fn contains_label(&self, l: &str) -> bool {
        self.0.contains(l)
    }

    /// `α ∈ L ∪ L̄`; never true for τ.
    pub fn contains(&self, a: &Action) -> bool {
        a.label().is_some_and(|l| self.0.contains(l))
    }

    pub fn is_subset(&self, other: &ActionSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &ActionSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Names and co-names of every label, in order.
    pub fn actions(&self) -> impl Iterator<Item = Action> + '_ {
        self.0
            .iter()
            .flat_map(|l| [Action::Name(l.clone()), Action::CoName(l.clone())])
    }
}

impl fmt::Display for ActionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(l)?;
        }
        f.write_str("}")
    }
}

/// A relabelling function on name labels, identity outside its domain.
/// Extended to actions by `f(τ) = τ` and `f('a) = 'f(a)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Relabelling(Arc<BTreeMap<Label, Label>>);

impl Relabelling {
    /// Builds from `(new, old)` pairs, the order they are written in `[new/old]`.
    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        Relabelling(Arc::new(
            pairs
                .into_iter()
                .map(|(new, old)| (label(old.as_ref()), label(new.as_ref())))
                .collect(),
        ))
    }

    pub fn from_map(map: BTreeMap<Label, Label>) -> Self {
        Relabelling(Arc::new(map))
    }

    /// old -> new.
    pub fn map(&self) -> &BTreeMap<Label, Label> {
        &self.0
    }

    pub fn apply_label<'a>(&'a self, l: &'a Label) -> &'a Label {
        self.0.get(l).unwrap_or(l)
    }

    pub fn apply(&self, a: &Action) -> Action {
        match a {
            Action::Tau => Action::Tau,
            Action::Name(l) => Action::Name(self.apply_label(l).clone()),
            Action::CoName(l) => Action::CoName(self.apply_label(l).clone()),
        }
    }

    /// Labels moved by the function (entries with `old != new`).
    pub fn moved_labels(&self) -> impl Iterator<Item = &Label> {
        self.0.iter().filter(|(old, new)| old != new).map(|(old, _)| old)
    }

    pub fn range(&self) -> impl Iterator<Item = &Label> {
        self.0.values()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Relabelling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (old, new)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{new}/{old}")?;
        }
        f.write_str("]")
    }
}
