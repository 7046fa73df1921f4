use crate::action::label;
use crate::error::AbstractionError;
use crate::frontend::Path;
use crate::process::{Family, Process};

use super::rules::apply_rule_logged;
use super::step::{kind_name, ParamValue, RuleId, RuleStep};

/// A rule whose left-hand side matches at a path.
#[derive(Clone, Debug)]
pub struct Applicable {
    pub rule: RuleId,
    /// A ready-to-apply step when `ready`, otherwise the step with the
    /// parameters that could be filled in.
    pub step: Option<RuleStep>,
    pub ready: bool,
    /// Why the rule is not ready: a failing side condition or a missing
    /// parameter.
    pub reason: Option<String>,
}

/// Rules whose shape matches the subterm at `path`, with side conditions
/// evaluated. Choice is matched modulo the order of its branches.
pub fn list_applicable(family: &Family, path: &Path) -> Result<Vec<Applicable>, AbstractionError> {
    let node = path.resolve(family)?;
    let at = Some(path.clone());
    let mut out = Vec::new();
    let mut offer = |rule: RuleId, params: Vec<(&str, ParamValue)>| {
        let step = RuleStep::new(rule, if rule.target() == super::TargetKind::Forbidden { None } else { at.clone() }, params.into_iter().map(|(k, v)| (k.to_string(), v)));
        let entry = match step {
            Ok(step) => match apply_rule_logged(family, &step) {
                Ok(_) => Applicable { rule, step: Some(step), ready: true, reason: None },
                Err(e) => Applicable { rule, step: Some(step), ready: false, reason: Some(e.to_string()) },
            },
            Err(_) => {
                let missing: Vec<String> = rule
                    .params()
                    .iter()
                    .filter(|s| s.required)
                    .map(|s| format!("{} ({})", s.name, kind_name(s.kind)))
                    .collect();
                Applicable { rule, step: None, ready: false, reason: Some(format!("needs {}", missing.join(", "))) }
            }
        };
        out.push(entry);
    };

    match node {
        Process::Restrict(body, _) => {
            offer(RuleId::RestHide, vec![]);
            offer(RuleId::RestRelabel, vec![]);
            if matches!(**body, Process::Par(..)) {
                offer(RuleId::ParHide, vec![]);
                offer(RuleId::ParRelabel, vec![]);
            }
        }
        Process::Hide(body, _) => {
            match **body {
                Process::Prefix(..) => offer(RuleId::HidePrefix, vec![]),
                Process::Sum(_) => offer(RuleId::HideSum, vec![]),
                Process::Par(..) => offer(RuleId::HidePar, vec![]),
                _ => {}
            }
            offer(RuleId::PushHide, vec![]);
        }
        Process::Relabel(body, _) => {
            match **body {
                Process::Prefix(..) => offer(RuleId::RelabelPrefix, vec![]),
                Process::Sum(_) => offer(RuleId::RelabelSum, vec![]),
                Process::Par(..) => offer(RuleId::RelabelPar, vec![]),
                _ => {}
            }
            offer(RuleId::PushRelabel, vec![]);
        }
        Process::Par(a, b) if **a == Process::Nil || **b == Process::Nil => offer(RuleId::DropNilPar, vec![]),
        Process::Prefix(a, _) if a.is_tau() => offer(RuleId::DropTau, vec![]),
        Process::Const(_) => offer(RuleId::Unfold, vec![]),
        _ => {}
    }
    if path.steps.is_empty() {
        let own = Process::Const(path.constant.clone());
        let recursive = match node {
            Process::Sum(cs) => cs.contains(&own),
            p => *p == own,
        };
        if recursive {
            offer(RuleId::DropUnguarded, vec![]);
        }
        offer(RuleId::Merge, vec![("a", ParamValue::Name(path.constant.clone()))]);
    }
    if contains_tau(node) {
        offer(RuleId::RemoveTauAll, vec![]);
    }
    for (name, body) in family.defs() {
        if body == node && *name != path.constant {
            offer(RuleId::Fold, vec![("to", ParamValue::Name(name.clone()))]);
        }
    }
    let base = label(&format!("{}f", path.constant));
    offer(RuleId::Fold, vec![("name", ParamValue::Name(base))]);
    Ok(out)
}

fn contains_tau(p: &Process) -> bool {
    matches!(p, Process::Prefix(a, _) if a.is_tau()) || p.children().into_iter().any(contains_tau)
}
