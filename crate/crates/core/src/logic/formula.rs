//! Modal mu-calculus formulas in positive normal form.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::action::Action;
use crate::error::LogicError;

pub type Var = Arc<str>;

/// A label inside a modality: an action, or ε (zero or more τ steps) for
/// weak modalities.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModLabel {
    Act(Action),
    Eps,
}

impl fmt::Display for ModLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModLabel::Act(a) => write!(f, "{a}"),
            ModLabel::Eps => f.write_str("eps"),
        }
    }
}

/// A finite label set, or the complement of one (`-L`) relative to the
/// action universe of the system being checked.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabelSet {
    pub complement: bool,
    pub members: BTreeSet<ModLabel>,
}

impl LabelSet {
    pub fn positive<I: IntoIterator<Item = ModLabel>>(members: I) -> Self {
        LabelSet { complement: false, members: members.into_iter().collect() }
    }

    pub fn complement_of<I: IntoIterator<Item = ModLabel>>(members: I) -> Self {
        LabelSet { complement: true, members: members.into_iter().collect() }
    }

    /// Positive set of names.
    pub fn names(names: &[&str]) -> Self {
        LabelSet::positive(names.iter().map(|n| ModLabel::Act(Action::name(n))))
    }

    pub fn matches(&self, l: &ModLabel) -> bool {
        self.members.contains(l) != self.complement
    }

    pub fn matches_action(&self, a: &Action) -> bool {
        self.members.contains(&ModLabel::Act(a.clone())) != self.complement
    }

    pub fn includes_eps(&self) -> bool {
        self.matches(&ModLabel::Eps)
    }

    /// The concrete labels denoted, against a universe of non-τ actions.
    /// Strong sets range over `universe ∪ {τ}`, weak sets over `universe ∪ {ε}`.
    pub fn resolve(&self, universe: &BTreeSet<Action>, weak: bool) -> BTreeSet<ModLabel> {
        if !self.complement {
            return self.members.clone();
        }
        let extra = if weak { ModLabel::Eps } else { ModLabel::Act(Action::Tau) };
        universe
            .iter()
            .cloned()
            .map(ModLabel::Act)
            .chain(std::iter::once(extra))
            .filter(|l| !self.members.contains(l))
            .collect()
    }

    fn validate(&self, kind: Modality) -> Result<(), LogicError> {
        for m in &self.members {
            match (m, kind.is_weak()) {
                (ModLabel::Eps, false) => return Err(LogicError::BadModalLabel("eps".into(), "strong")),
                (ModLabel::Act(Action::Tau), true) => return Err(LogicError::BadModalLabel("tau".into(), "weak")),
                _ => {}
            }
        }
        Ok(())
    }
}

impl fmt::Display for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.complement {
            f.write_str("-")?;
        }
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Modality {
    Box,
    Diamond,
    WeakBox,
    WeakDiamond,
}

impl Modality {
    pub fn is_weak(self) -> bool {
        matches!(self, Modality::WeakBox | Modality::WeakDiamond)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Var(Var),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Modal(Modality, LabelSet, Box<Formula>),
    Nu(Var, Box<Formula>),
    Mu(Var, Box<Formula>),
}

/// Syntactic fragment of a closed formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fragment {
    /// Only weak-box modalities: preserved downwards along weak simulation.
    MuIlBox,
    General,
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fragment::MuIlBox => "muILBox",
            Fragment::General => "general",
        })
    }
}

impl Formula {
    pub fn var(z: &str) -> Self {
        Formula::Var(Arc::from(z))
    }

    /// `νZ.Z`
    pub fn tt() -> Self {
        Formula::Nu(Arc::from("Z"), Box::new(Formula::var("Z")))
    }

    /// `μZ.Z`
    pub fn ff() -> Self {
        Formula::Mu(Arc::from("Z"), Box::new(Formula::var("Z")))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn nu(z: &str, body: Formula) -> Self {
        Formula::Nu(Arc::from(z), Box::new(body))
    }

    pub fn mu(z: &str, body: Formula) -> Self {
        Formula::Mu(Arc::from(z), Box::new(body))
    }

    /// Checks the label restrictions of the modality kind.
    pub fn modal(kind: Modality, labels: LabelSet, body: Formula) -> Result<Self, LogicError> {
        labels.validate(kind)?;
        Ok(Formula::Modal(kind, labels, Box::new(body)))
    }

    pub fn weak_box(labels: LabelSet, body: Formula) -> Self {
        Formula::modal(Modality::WeakBox, labels, body).expect("tau in a weak modality")
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go(f: &Formula, bound: &mut Vec<Var>, out: &mut BTreeSet<String>) {
            match f {
                Formula::Var(z) => {
                    if !bound.contains(z) {
                        out.insert(z.to_string());
                    }
                }
                Formula::And(l, r) | Formula::Or(l, r) => {
                    go(l, bound, out);
                    go(r, bound, out);
                }
                Formula::Modal(_, _, b) => go(b, bound, out),
                Formula::Nu(z, b) | Formula::Mu(z, b) => {
                    bound.push(z.clone());
                    go(b, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Var(_) => 0,
            Formula::And(l, r) | Formula::Or(l, r) => 1 + l.depth().max(r.depth()),
            Formula::Modal(_, _, b) | Formula::Nu(_, b) | Formula::Mu(_, b) => 1 + b.depth(),
        }
    }

    fn modalities(&self, out: &mut Vec<Modality>) {
        match self {
            Formula::Var(_) => {}
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.modalities(out);
                r.modalities(out);
            }
            Formula::Modal(k, _, b) => {
                out.push(*k);
                b.modalities(out);
            }
            Formula::Nu(_, b) | Formula::Mu(_, b) => b.modalities(out),
        }
    }

    /// Replaces free occurrences of `z` by `by`. `by` must be closed.
    pub fn substitute(&self, z: &str, by: &Formula) -> Formula {
        match self {
            Formula::Var(v) if &**v == z => by.clone(),
            Formula::Var(_) => self.clone(),
            Formula::And(l, r) => Formula::and(l.substitute(z, by), r.substitute(z, by)),
            Formula::Or(l, r) => Formula::or(l.substitute(z, by), r.substitute(z, by)),
            Formula::Modal(k, s, b) => Formula::Modal(*k, s.clone(), Box::new(b.substitute(z, by))),
            Formula::Nu(v, _) | Formula::Mu(v, _) if &**v == z => self.clone(),
            Formula::Nu(v, b) => Formula::Nu(v.clone(), Box::new(b.substitute(z, by))),
            Formula::Mu(v, b) => Formula::Mu(v.clone(), Box::new(b.substitute(z, by))),
        }
    }

    /// Renames bound variables so that no two binders share a name and no
    /// binder reuses a free variable's name. The first binder of a name keeps it.
    pub fn alpha_rename(&self) -> Formula {
        let mut used: HashSet<String> = self.free_vars().into_iter().collect();
        let mut env: HashMap<Var, Var> = HashMap::new();
        rename(self, &mut used, &mut env)
    }
}

fn rename(f: &Formula, used: &mut HashSet<String>, env: &mut HashMap<Var, Var>) -> Formula {
    match f {
        Formula::Var(z) => Formula::Var(env.get(z).cloned().unwrap_or_else(|| z.clone())),
        Formula::And(l, r) => Formula::and(rename(l, used, env), rename(r, used, env)),
        Formula::Or(l, r) => Formula::or(rename(l, used, env), rename(r, used, env)),
        Formula::Modal(k, s, b) => Formula::Modal(*k, s.clone(), Box::new(rename(b, used, env))),
        Formula::Nu(z, b) | Formula::Mu(z, b) => {
            let fresh: Var = if used.contains(&**z) {
                let name = (1..).map(|i| format!("{z}_{i}")).find(|n| !used.contains(n)).unwrap();
                Arc::from(name.as_str())
            } else {
                z.clone()
            };
            used.insert(fresh.to_string());
            let saved = env.insert(z.clone(), fresh.clone());
            let body = Box::new(rename(b, used, env));
            match saved {
                Some(s) => env.insert(z.clone(), s),
                None => env.remove(z),
            };
            match f {
                Formula::Nu(..) => Formula::Nu(fresh, body),
                _ => Formula::Mu(fresh, body),
            }
        }
    }
}

/// μIL□ when every modality is a weak box.
pub fn classify(phi: &Formula) -> Result<Fragment, LogicError> {
    let free = phi.free_vars();
    if !free.is_empty() {
        return Err(LogicError::FreeVariables(free.into_iter().collect()));
    }
    let mut mods = Vec::new();
    phi.modalities(&mut mods);
    Ok(if mods.iter().all(|m| *m == Modality::WeakBox) { Fragment::MuIlBox } else { Fragment::General })
}

/// The alternation property for `enter`-like labels `l1` and `exit`-like
/// labels `l2`:
///
/// ```text
/// νX1. [[L2]]ff ∧ [[-L1,L2]]X1 ∧ [[L1]](νX2. [[L1]]ff ∧ [[-L1,L2]]X2 ∧ [[L2]]X1)
/// ```
pub fn expand_macro_cycle(l1: &LabelSet, l2: &LabelSet) -> Result<Formula, LogicError> {
    let ok = |s: &LabelSet| !s.complement && s.members.iter().all(|m| matches!(m, ModLabel::Act(a) if !a.is_tau()));
    if !ok(l1) || !ok(l2) || !l1.members.is_disjoint(&l2.members) {
        return Err(LogicError::BadCycleSets);
    }
    let others = LabelSet::complement_of(l1.members.union(&l2.members).cloned());
    let wb = |s: &LabelSet, body: Formula| Formula::weak_box(s.clone(), body);
    let inner = Formula::nu(
        "X2",
        Formula::and(
            Formula::and(wb(l1, Formula::ff()), wb(&others, Formula::var("X2"))),
            wb(l2, Formula::var("X1")),
        ),
    );
    Ok(Formula::nu(
        "X1",
        Formula::and(Formula::and(wb(l2, Formula::ff()), wb(&others, Formula::var("X1"))), wb(l1, inner)),
    ))
}

const P_BIND: u8 = 0;
const P_OR: u8 = 1;
const P_AND: u8 = 2;
const P_UNARY: u8 = 3;

fn write_formula(f: &mut fmt::Formatter<'_>, phi: &Formula, ctx: u8) -> fmt::Result {
    let level = match phi {
        Formula::Or(..) => P_OR,
        Formula::And(..) => P_AND,
        Formula::Nu(z, b) | Formula::Mu(z, b) if !matches!(&**b, Formula::Var(v) if v == z) => P_BIND,
        _ => P_UNARY,
    };
    let paren = level < ctx;
    if paren {
        f.write_str("(")?;
    }
    match phi {
        Formula::Var(z) => f.write_str(z)?,
        Formula::Or(l, r) => {
            write_formula(f, l, P_OR)?;
            f.write_str(" | ")?;
            write_formula(f, r, P_AND)?;
        }
        Formula::And(l, r) => {
            write_formula(f, l, P_AND)?;
            f.write_str(" & ")?;
            write_formula(f, r, P_UNARY)?;
        }
        Formula::Modal(k, s, b) => {
            let (open, close) = match k {
                Modality::Box => ("[", "]"),
                Modality::Diamond => ("<", ">"),
                Modality::WeakBox => ("[[", "]]"),
                Modality::WeakDiamond => ("<<", ">>"),
            };
            write!(f, "{open}{s}{close}")?;
            write_formula(f, b, P_UNARY)?;
        }
        Formula::Nu(z, b) | Formula::Mu(z, b) => {
            let is_const = matches!(&**b, Formula::Var(v) if v == z);
            match (phi, is_const) {
                (Formula::Nu(..), true) => f.write_str("tt")?,
                (Formula::Mu(..), true) => f.write_str("ff")?,
                (Formula::Nu(..), false) => {
                    write!(f, "max {z}. ")?;
                    write_formula(f, b, P_BIND)?;
                }
                _ => {
                    write!(f, "min {z}. ")?;
                    write_formula(f, b, P_BIND)?;
                }
            }
        }
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, P_BIND)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_is_in_the_weak_box_fragment() {
        let c = expand_macro_cycle(&LabelSet::names(&["enter"]), &LabelSet::names(&["exit"])).unwrap();
        assert_eq!(classify(&c).unwrap(), Fragment::MuIlBox);
        assert!(c.free_vars().is_empty());
    }

    #[test]
    fn cycle_rejects_overlap() {
        let err = expand_macro_cycle(&LabelSet::names(&["a", "b"]), &LabelSet::names(&["b"])).unwrap_err();
        assert_eq!(err, LogicError::BadCycleSets);
    }

    #[test]
    fn diamond_is_general() {
        let phi = Formula::modal(Modality::Diamond, LabelSet::names(&["a"]), Formula::tt()).unwrap();
        assert_eq!(classify(&phi).unwrap(), Fragment::General);
    }

    #[test]
    fn open_formula_lists_free_variables() {
        let phi = Formula::and(Formula::var("Y"), Formula::var("X"));
        assert_eq!(classify(&phi).unwrap_err(), LogicError::FreeVariables(vec!["X".into(), "Y".into()]));
    }

    #[test]
    fn weak_modalities_reject_tau_and_strong_reject_eps() {
        let tau = LabelSet::positive([ModLabel::Act(Action::Tau)]);
        assert!(Formula::modal(Modality::WeakBox, tau.clone(), Formula::tt()).is_err());
        assert!(Formula::modal(Modality::Box, tau, Formula::tt()).is_ok());
        let eps = LabelSet::positive([ModLabel::Eps]);
        assert!(Formula::modal(Modality::Diamond, eps, Formula::tt()).is_err());
    }

    #[test]
    fn alpha_rename_makes_binders_unique() {
        let phi = Formula::and(Formula::nu("X", Formula::var("X")), Formula::mu("X", Formula::nu("X", Formula::var("X"))));
        let r = phi.alpha_rename();
        assert_eq!(r.to_string(), "tt & (min X_1. tt)");
        assert!(matches!(r, Formula::And(_, ref m) if matches!(&**m, Formula::Mu(x, b) if &**x == "X_1" && matches!(&**b, Formula::Nu(y, _) if &**y == "X_2"))));
    }

    #[test]
    fn complement_resolution() {
        let universe: BTreeSet<Action> = [Action::name("a"), Action::coname("a")].into();
        let s = LabelSet::complement_of([ModLabel::Act(Action::name("a"))]);
        let weak = s.resolve(&universe, true);
        assert_eq!(weak, [ModLabel::Act(Action::coname("a")), ModLabel::Eps].into());
        let strong = s.resolve(&universe, false);
        assert_eq!(strong, [ModLabel::Act(Action::coname("a")), ModLabel::Act(Action::Tau)].into());
    }
}
