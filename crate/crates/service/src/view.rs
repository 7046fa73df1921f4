//! JSON shapes returned by the API. Field names are camelCase.

use std::collections::BTreeMap;

use ccsabst_core::abstraction::{Applicable, Certification, RuleStep};
use ccsabst_core::frontend::{print_family, print_process, Path};
use ccsabst_core::logic::classify;
use ccsabst_core::{Family, Process};
use serde::Serialize;

use crate::session::{Entry, Session};

/// A subterm with the path that addresses it.
#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NodeView {
    pub path: String,
    pub kind: &'static str,
    /// Operator detail: the action of a prefix, the set of a restriction or
    /// hiding, the map of a relabelling, the name of a constant.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub text: String,
    pub children: Vec<NodeView>,
}

impl NodeView {
    pub fn new(p: &Process, path: Path) -> Self {
        let (kind, label) = match p {
            Process::Nil => ("nil", None),
            Process::Const(n) => ("constant", Some(n.to_string())),
            Process::Prefix(a, _) => ("prefix", Some(a.to_string())),
            Process::Sum(_) => ("sum", None),
            Process::Par(..) => ("par", None),
            Process::Restrict(_, l) => ("restrict", Some(l.to_string())),
            Process::Relabel(_, f) => ("relabel", Some(f.to_string())),
            Process::Hide(_, l) => ("hide", Some(l.to_string())),
        };
        let children = p.children().into_iter().enumerate().map(|(i, c)| NodeView::new(c, path.child(i))).collect();
        NodeView { path: path.to_string(), kind, label, text: print_process(p), children }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DefinitionView {
    pub name: String,
    pub tree: NodeView,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FamilyView {
    pub root: String,
    pub text: String,
    pub definitions: Vec<DefinitionView>,
}

impl FamilyView {
    pub fn new(f: &Family) -> Self {
        let definitions = f
            .defs()
            .iter()
            .map(|(name, body)| DefinitionView { name: name.to_string(), tree: NodeView::new(body, Path::root_of(name)) })
            .collect();
        FamilyView { root: f.root().to_string(), text: print_family(f), definitions }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CertificationView {
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl From<&Certification> for CertificationView {
    fn from(c: &Certification) -> Self {
        let (status, reason) = match c {
            Certification::Certified => ("certified", None),
            Certification::Failed => ("failed", None),
            Certification::Skipped => ("skipped", None),
            Certification::Pending => ("pending", None),
            Certification::Refused(why) => ("refused", Some(why.clone())),
        };
        CertificationView { status, reason }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StepView {
    pub rule: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    pub params: BTreeMap<String, String>,
    pub text: String,
}

impl From<&RuleStep> for StepView {
    fn from(s: &RuleStep) -> Self {
        StepView {
            rule: s.rule.to_string(),
            target: s.target.as_ref().map(|t| t.to_string()),
            params: s.params().iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
            text: s.to_string(),
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EntryView {
    /// 1-based; snapshot `index` is the family after this step.
    pub index: usize,
    pub step: StepView,
    pub state_count: Option<usize>,
    pub certification: CertificationView,
    pub chain: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl EntryView {
    pub fn new(index: usize, e: &Entry) -> Self {
        EntryView {
            index,
            step: (&e.step).into(),
            state_count: e.states,
            certification: (&e.certification).into(),
            chain: e.chain.clone(),
            note: e.note.clone(),
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PropView {
    pub name: String,
    pub params: Vec<String>,
    /// Absent for parameterised props, which are classified once applied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fragment: Option<String>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionView {
    pub id: String,
    pub initial: FamilyView,
    pub initial_state_count: Option<usize>,
    pub family: FamilyView,
    pub state_count: Option<usize>,
    pub history: Vec<EntryView>,
    pub props: Vec<PropView>,
}

impl SessionView {
    pub fn new(s: &Session) -> Self {
        SessionView {
            id: s.id.clone(),
            initial: FamilyView::new(&s.initial),
            initial_state_count: s.initial_states,
            family: FamilyView::new(s.current()),
            state_count: s.current_states(),
            history: s.history.iter().enumerate().map(|(i, e)| EntryView::new(i + 1, e)).collect(),
            props: s
                .props
                .props
                .values()
                .map(|p| PropView {
                    name: p.name.to_string(),
                    params: p.params.iter().map(|x| x.to_string()).collect(),
                    fragment: p.formula().and_then(|f| classify(f).ok()).map(|f| f.to_string()),
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ApplicableView {
    pub rule: String,
    pub ready: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<StepView>,
}

impl From<&Applicable> for ApplicableView {
    fn from(a: &Applicable) -> Self {
        ApplicableView {
            rule: a.rule.to_string(),
            ready: a.ready,
            reason: a.reason.clone(),
            step: a.step.as_ref().map(StepView::from),
        }
    }
}
