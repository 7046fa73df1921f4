use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::action::{ActionSet, Label, Relabelling};
use crate::error::AbstractionError;
use crate::frontend::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    RestHide,
    RestRelabel,
    HidePrefix,
    HideSum,
    HidePar,
    RelabelPrefix,
    RelabelSum,
    RelabelPar,
    Merge,
    DropUnguarded,
    DropNilPar,
    DropTau,
    Unfold,
    Fold,
    ParHide,
    ParRelabel,
    PushHide,
    PushRelabel,
    RemoveTauAll,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamKind {
    Set,
    Relabelling,
    Constant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
    pub required: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TargetKind {
    Required,
    Optional,
    Forbidden,
}

const fn req(name: &'static str, kind: ParamKind) -> ParamSpec {
    ParamSpec { name, kind, required: true }
}

const fn opt(name: &'static str, kind: ParamKind) -> ParamSpec {
    ParamSpec { name, kind, required: false }
}

impl RuleId {
    pub const ALL: [RuleId; 19] = [
        RuleId::RestHide,
        RuleId::RestRelabel,
        RuleId::HidePrefix,
        RuleId::HideSum,
        RuleId::HidePar,
        RuleId::RelabelPrefix,
        RuleId::RelabelSum,
        RuleId::RelabelPar,
        RuleId::Merge,
        RuleId::DropUnguarded,
        RuleId::DropNilPar,
        RuleId::DropTau,
        RuleId::Unfold,
        RuleId::Fold,
        RuleId::ParHide,
        RuleId::ParRelabel,
        RuleId::PushHide,
        RuleId::PushRelabel,
        RuleId::RemoveTauAll,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::RestHide => "rest-hide",
            RuleId::RestRelabel => "rest-relabel",
            RuleId::HidePrefix => "hide-prefix",
            RuleId::HideSum => "hide-sum",
            RuleId::HidePar => "hide-par",
            RuleId::RelabelPrefix => "relabel-prefix",
            RuleId::RelabelSum => "relabel-sum",
            RuleId::RelabelPar => "relabel-par",
            RuleId::Merge => "merge",
            RuleId::DropUnguarded => "drop-unguarded",
            RuleId::DropNilPar => "drop-nil-par",
            RuleId::DropTau => "drop-tau",
            RuleId::Unfold => "unfold",
            RuleId::Fold => "fold",
            RuleId::ParHide => "par-hide",
            RuleId::ParRelabel => "par-relabel",
            RuleId::PushHide => "push-hide",
            RuleId::PushRelabel => "push-relabel",
            RuleId::RemoveTauAll => "remove-tau-all",
        }
    }

    pub fn params(self) -> &'static [ParamSpec] {
        const SET: &[ParamSpec] = &[req("K", ParamKind::Set)];
        const REL: &[ParamSpec] = &[req("f", ParamKind::Relabelling)];
        const MERGE: &[ParamSpec] = &[req("a", ParamKind::Constant), req("b", ParamKind::Constant)];
        const FOLD: &[ParamSpec] = &[opt("name", ParamKind::Constant), opt("to", ParamKind::Constant)];
        match self {
            RuleId::RestHide | RuleId::ParHide => SET,
            RuleId::RestRelabel | RuleId::ParRelabel => REL,
            RuleId::Merge => MERGE,
            RuleId::Fold => FOLD,
            _ => &[],
        }
    }

    pub fn target(self) -> TargetKind {
        match self {
            RuleId::Merge => TargetKind::Forbidden,
            RuleId::PushHide | RuleId::PushRelabel | RuleId::RemoveTauAll => TargetKind::Optional,
            _ => TargetKind::Required,
        }
    }

    /// Macro steps chain several catalog rules.
    pub fn is_macro(self) -> bool {
        matches!(self, RuleId::PushHide | RuleId::PushRelabel | RuleId::RemoveTauAll)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RuleId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleId::ALL.iter().copied().find(|r| r.as_str() == s).ok_or_else(|| format!("unknown rule id `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamValue {
    Set(ActionSet),
    Relabelling(Relabelling),
    Name(Label),
}

impl ParamValue {
    fn kind(&self) -> ParamKind {
        match self {
            ParamValue::Set(_) => ParamKind::Set,
            ParamValue::Relabelling(_) => ParamKind::Relabelling,
            ParamValue::Name(_) => ParamKind::Constant,
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Set(s) => write!(f, "{s}"),
            ParamValue::Relabelling(r) => write!(f, "{r}"),
            ParamValue::Name(n) => f.write_str(n),
        }
    }
}

/// One rule application: rule, target subterm and typed parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleStep {
    pub rule: RuleId,
    pub target: Option<Path>,
    params: BTreeMap<String, ParamValue>,
}

impl RuleStep {
    /// Checks the target and parameters against the rule's signature.
    pub fn new(
        rule: RuleId,
        target: Option<Path>,
        params: impl IntoIterator<Item = (String, ParamValue)>,
    ) -> Result<Self, AbstractionError> {
        let bad = |reason: String| AbstractionError::BadParams { rule: rule.as_str(), reason };
        match (rule.target(), &target) {
            (TargetKind::Required, None) => return Err(bad("a target is required".into())),
            (TargetKind::Forbidden, Some(_)) => return Err(bad("takes no target".into())),
            _ => {}
        }
        let params: BTreeMap<String, ParamValue> = params.into_iter().collect();
        let sig = rule.params();
        for (k, v) in &params {
            let spec = sig.iter().find(|s| s.name == k).ok_or_else(|| bad(format!("unknown parameter `{k}`")))?;
            if spec.kind != v.kind() {
                return Err(bad(format!("parameter `{k}` expects a {}", kind_name(spec.kind))));
            }
        }
        for spec in sig.iter().filter(|s| s.required) {
            if !params.contains_key(spec.name) {
                return Err(bad(format!("missing parameter `{}`", spec.name)));
            }
        }
        Ok(RuleStep { rule, target, params })
    }

    /// A step without parameters at `target`.
    pub fn at(rule: RuleId, target: Path) -> Result<Self, AbstractionError> {
        RuleStep::new(rule, Some(target), [])
    }

    pub fn params(&self) -> &BTreeMap<String, ParamValue> {
        &self.params
    }

    pub fn set(&self, key: &str) -> Option<&ActionSet> {
        match self.params.get(key) {
            Some(ParamValue::Set(s)) => Some(s),
            _ => None,
        }
    }

    pub fn relabelling(&self, key: &str) -> Option<&Relabelling> {
        match self.params.get(key) {
            Some(ParamValue::Relabelling(r)) => Some(r),
            _ => None,
        }
    }

    pub fn name(&self, key: &str) -> Option<&Label> {
        match self.params.get(key) {
            Some(ParamValue::Name(n)) => Some(n),
            _ => None,
        }
    }
}

pub(crate) fn kind_name(k: ParamKind) -> &'static str {
    match k {
        ParamKind::Set => "action set",
        ParamKind::Relabelling => "relabelling",
        ParamKind::Constant => "constant name",
    }
}

/// `step <rule> [target=<path>] [k=v ...]`, parameters in signature order.
impl fmt::Display for RuleStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}", self.rule)?;
        if let Some(t) = &self.target {
            write!(f, " target={t}")?;
        }
        for spec in self.rule.params() {
            if let Some(v) = self.params.get(spec.name) {
                write!(f, " {}={v}", spec.name)?;
            }
        }
        Ok(())
    }
}

/// An ordered list of rule applications.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Script {
    pub steps: Vec<RuleStep>,
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}
