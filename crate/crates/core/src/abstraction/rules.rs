use crate::action::{label, Action, ActionSet, Relabelling};
use crate::error::AbstractionError;
use crate::frontend::{print_process, Path};
use crate::process::{Family, Process};

use super::macros::{push, remove_tau_all, Op};
use super::step::{RuleId, RuleStep};

/// Result of one rule application.
#[derive(Clone, Debug)]
pub struct Applied {
    pub family: Family,
    /// Catalog rules the step decomposes into, for macro steps.
    pub chain: Vec<String>,
    /// Anything the caller should know, e.g. the name chosen by `fold`.
    pub note: Option<String>,
}

/// Applies `step` to `family`.
pub fn apply_rule(family: &Family, step: &RuleStep) -> Result<Family, AbstractionError> {
    apply_rule_logged(family, step).map(|a| a.family)
}

pub fn apply_rule_logged(family: &Family, step: &RuleStep) -> Result<Applied, AbstractionError> {
    let applied = dispatch(family, step)?;
    applied.family.validate()?;
    if let Some(c) = applied.family.static_unguarded_cycle() {
        return Err(side(
            step.rule,
            format!("the result has unguarded recursion through a static operator at `{c}`"),
        ));
    }
    Ok(applied)
}

fn side(rule: RuleId, reason: impl Into<String>) -> AbstractionError {
    AbstractionError::SideCondition { rule: rule.as_str(), reason: reason.into() }
}

fn mismatch(step: &RuleStep, reason: impl Into<String>) -> AbstractionError {
    AbstractionError::Mismatch {
        rule: step.rule.as_str(),
        target: step.target.as_ref().map(|t| t.to_string()).unwrap_or_default(),
        reason: reason.into(),
    }
}

fn plain(family: Family) -> Applied {
    Applied { family, chain: vec![], note: None }
}

fn dispatch(family: &Family, step: &RuleStep) -> Result<Applied, AbstractionError> {
    let rule = step.rule;
    match rule {
        RuleId::Merge => return merge(family, step),
        RuleId::PushHide | RuleId::PushRelabel | RuleId::RemoveTauAll => return macro_step(family, step),
        RuleId::DropUnguarded => return drop_unguarded(family, step),
        RuleId::Fold => return fold(family, step),
        _ => {}
    }
    let target = step.target.as_ref().expect("signature requires a target");
    let node = target.resolve(family)?;
    let found = || format!("found `{}`", print_process(node));
    let new = match rule {
        RuleId::RestHide => {
            let Process::Restrict(body, l) = node else { return Err(mismatch(step, format!("expected E\\L, {}", found()))) };
            let k = step.set("K").unwrap();
            subset(rule, k, l)?;
            Process::restrict(Process::hide((**body).clone(), k.clone()), l.clone())
        }
        RuleId::RestRelabel => {
            let Process::Restrict(body, l) = node else { return Err(mismatch(step, format!("expected E\\L, {}", found()))) };
            let f = step.relabelling("f").unwrap();
            identity_outside(rule, f, l)?;
            Process::restrict(Process::relabel((**body).clone(), f.clone()), l.clone())
        }
        RuleId::HidePrefix => {
            let Process::Hide(body, l) = node else { return Err(mismatch(step, format!("expected (a.E)\\\\L, {}", found()))) };
            let Process::Prefix(a, e) = &**body else { return Err(mismatch(step, format!("expected (a.E)\\\\L, {}", found()))) };
            if !l.contains(a) {
                return Err(side(rule, format!("`{a}` is not in {l}")));
            }
            Process::prefix(Action::Tau, Process::hide((**e).clone(), l.clone()))
        }
        RuleId::HideSum => {
            let Process::Hide(body, l) = node else { return Err(mismatch(step, format!("expected (E+F)\\\\L, {}", found()))) };
            let Process::Sum(cs) = &**body else { return Err(mismatch(step, format!("expected (E+F)\\\\L, {}", found()))) };
            Process::sum(cs.iter().map(|c| Process::hide(c.clone(), l.clone())))
        }
        RuleId::HidePar => {
            // Action sets are closed under complement, so L = L̄ always holds.
            let Process::Hide(body, l) = node else { return Err(mismatch(step, format!("expected (E|F)\\\\L, {}", found()))) };
            let Process::Par(a, b) = &**body else { return Err(mismatch(step, format!("expected (E|F)\\\\L, {}", found()))) };
            Process::par(Process::hide((**a).clone(), l.clone()), Process::hide((**b).clone(), l.clone()))
        }
        RuleId::RelabelPrefix => {
            let Process::Relabel(body, f) = node else { return Err(mismatch(step, format!("expected (a.E)[f], {}", found()))) };
            let Process::Prefix(a, e) = &**body else { return Err(mismatch(step, format!("expected (a.E)[f], {}", found()))) };
            Process::prefix(f.apply(a), Process::relabel((**e).clone(), f.clone()))
        }
        RuleId::RelabelSum => {
            let Process::Relabel(body, f) = node else { return Err(mismatch(step, format!("expected (E+F)[f], {}", found()))) };
            let Process::Sum(cs) = &**body else { return Err(mismatch(step, format!("expected (E+F)[f], {}", found()))) };
            Process::sum(cs.iter().map(|c| Process::relabel(c.clone(), f.clone())))
        }
        RuleId::RelabelPar => {
            let Process::Relabel(body, f) = node else { return Err(mismatch(step, format!("expected (E|F)[f], {}", found()))) };
            let Process::Par(a, b) = &**body else { return Err(mismatch(step, format!("expected (E|F)[f], {}", found()))) };
            Process::par(Process::relabel((**a).clone(), f.clone()), Process::relabel((**b).clone(), f.clone()))
        }
        RuleId::DropNilPar => match node {
            Process::Par(a, b) if **b == Process::Nil => (**a).clone(),
            Process::Par(a, b) if **a == Process::Nil => (**b).clone(),
            _ => return Err(mismatch(step, format!("expected E|0 or 0|E, {}", found()))),
        },
        RuleId::DropTau => match node {
            Process::Prefix(Action::Tau, e) => (**e).clone(),
            _ => return Err(mismatch(step, format!("expected tau.E, {}", found()))),
        },
        RuleId::Unfold => match node {
            Process::Const(a) => family.lookup(a)?.clone(),
            _ => return Err(mismatch(step, format!("expected a constant, {}", found()))),
        },
        RuleId::ParHide | RuleId::ParRelabel => {
            let Process::Restrict(body, l) = node else {
                return Err(mismatch(step, format!("expected (E1|...|En)\\L, {}", found())));
            };
            if !matches!(**body, Process::Par(..)) {
                return Err(mismatch(step, format!("expected (E1|...|En)\\L, {}", found())));
            }
            let wrap: Box<dyn Fn(Process) -> Process> = if rule == RuleId::ParHide {
                let k = step.set("K").unwrap();
                subset(rule, k, l)?;
                let k = k.clone();
                Box::new(move |e| Process::hide(e, k.clone()))
            } else {
                let f = step.relabelling("f").unwrap();
                identity_outside(rule, f, l)?;
                let f = f.clone();
                Box::new(move |e| Process::relabel(e, f.clone()))
            };
            Process::restrict(map_par_leaves(body, &*wrap), l.clone())
        }
        RuleId::Merge | RuleId::PushHide | RuleId::PushRelabel | RuleId::RemoveTauAll | RuleId::DropUnguarded | RuleId::Fold => {
            unreachable!()
        }
    };
    Ok(plain(target.replace(family, new)?))
}

fn subset(rule: RuleId, k: &ActionSet, l: &ActionSet) -> Result<(), AbstractionError> {
    if k.is_subset(l) {
        Ok(())
    } else {
        let extra: Vec<&str> = k.labels().iter().filter(|x| !l.contains_label(x)).map(|x| &**x).collect();
        Err(side(rule, format!("K = {k} is not contained in L = {l}: {} outside", extra.join(","))))
    }
}

fn identity_outside(rule: RuleId, f: &Relabelling, l: &ActionSet) -> Result<(), AbstractionError> {
    let moved: Vec<&str> = f.moved_labels().filter(|x| !l.contains_label(x)).map(|x| &**x).collect();
    if moved.is_empty() {
        Ok(())
    } else {
        Err(side(rule, format!("{f} moves {} outside L = {l}", moved.join(","))))
    }
}

fn map_par_leaves(p: &Process, wrap: &dyn Fn(Process) -> Process) -> Process {
    match p {
        Process::Par(a, b) => Process::par(map_par_leaves(a, wrap), map_par_leaves(b, wrap)),
        other => wrap(other.clone()),
    }
}

fn merge(family: &Family, step: &RuleStep) -> Result<Applied, AbstractionError> {
    let (a, b) = (step.name("a").unwrap(), step.name("b").unwrap());
    let rule = step.rule;
    if a == b {
        return Err(side(rule, "cannot merge a constant with itself"));
    }
    let ba = family.get(a).ok_or_else(|| side(rule, format!("no constant `{a}`")))?;
    let bb = family.get(b).ok_or_else(|| side(rule, format!("no constant `{b}`")))?;
    let mut out = family.clone();
    out.set_def(a.clone(), Process::sum([ba.clone(), bb.clone()]));
    out.remove_def(b);
    out.rename(b, a);
    Ok(plain(out))
}

fn drop_unguarded(family: &Family, step: &RuleStep) -> Result<Applied, AbstractionError> {
    let target = step.target.as_ref().unwrap();
    if !target.steps.is_empty() {
        return Err(mismatch(step, "target must be a whole definition, e.g. `target=A`"));
    }
    let a = &target.constant;
    let body = family.get(a).ok_or_else(|| AbstractionError::BadPath(target.to_string()))?;
    let own = Process::Const(a.clone());
    let new = match body {
        Process::Sum(cs) if cs.contains(&own) => Process::sum(cs.iter().filter(|c| **c != own).cloned()),
        p if *p == own => Process::Nil,
        _ => return Err(mismatch(step, format!("`{a}` does not occur as a summand of its own definition"))),
    };
    let mut out = family.clone();
    out.set_def(a.clone(), new);
    Ok(plain(out))
}

fn fold(family: &Family, step: &RuleStep) -> Result<Applied, AbstractionError> {
    let target = step.target.as_ref().unwrap();
    let node = target.resolve(family)?.clone();
    let rule = step.rule;
    if let Some(to) = step.name("to") {
        if step.name("name").is_some() {
            return Err(AbstractionError::BadParams { rule: rule.as_str(), reason: "give either `name` or `to`, not both".into() });
        }
        let body = family.get(to).ok_or_else(|| side(rule, format!("no constant `{to}`")))?;
        if *body != node {
            return Err(side(
                rule,
                format!("`{to}` is defined as `{}`, not `{}`", print_process(body), print_process(&node)),
            ));
        }
        let out = target.replace(family, Process::Const(to.clone()))?;
        if target.is_unguarded(family)? && out.unguarded_reaches(to, &target.constant) {
            return Err(side(rule, format!("folding into `{to}` would make its definition unguarded")));
        }
        return Ok(plain(out));
    }
    let base = step.name("name").cloned().unwrap_or_else(|| label(&format!("{}f", target.constant)));
    let fresh = family.fresh_name(&base);
    let mut out = target.replace(family, Process::Const(fresh.clone()))?;
    out.insert_def_after(&target.constant, fresh.clone(), node);
    let note = (fresh != base).then(|| format!("`{base}` is taken; folded into `{fresh}`"));
    Ok(Applied { family: out, chain: vec![], note })
}

fn macro_step(family: &Family, step: &RuleStep) -> Result<Applied, AbstractionError> {
    if let Some(t) = &step.target {
        t.resolve(family)?;
    }
    let (family, chain) = match step.rule {
        RuleId::PushHide => push(family, step.target.as_ref(), Op::Hide),
        RuleId::PushRelabel => push(family, step.target.as_ref(), Op::Relabel),
        _ => remove_tau_all(family, step.target.as_ref()),
    }?;
    if chain.is_empty() {
        return Err(mismatch(step, "nothing to rewrite"));
    }
    Ok(Applied { family, chain, note: None })
}

/// Every subterm path of every definition, in definition then pre-order.
pub fn all_paths(family: &Family) -> Vec<Path> {
    fn go(p: &Process, path: Path, out: &mut Vec<Path>) {
        for (i, c) in p.children().into_iter().enumerate() {
            let cp = path.child(i);
            out.push(cp.clone());
            go(c, cp, out);
        }
    }
    let mut out = Vec::new();
    for (name, body) in family.defs() {
        let root = Path { constant: name.clone(), steps: vec![] };
        out.push(root.clone());
        go(body, root, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abstraction::step::ParamValue;
    use crate::frontend::{parse_ccs, print_family};

    fn fam(src: &str) -> Family {
        parse_ccs(src).unwrap().family
    }

    fn at(rule: RuleId, path: &str) -> RuleStep {
        RuleStep::at(rule, path.parse().unwrap()).unwrap()
    }

    fn with(rule: RuleId, path: Option<&str>, params: Vec<(&str, ParamValue)>) -> RuleStep {
        RuleStep::new(rule, path.map(|p| p.parse().unwrap()), params.into_iter().map(|(k, v)| (k.to_string(), v))).unwrap()
    }

    fn name(n: &str) -> ParamValue {
        ParamValue::Name(label(n))
    }

    #[test]
    fn merge_example() {
        let f = fam("agent B = b.A;\nagent A = a.B;");
        let out = apply_rule(&f, &with(RuleId::Merge, None, vec![("a", name("A")), ("b", name("B"))])).unwrap();
        assert_eq!(print_family(&out), "agent A = a.A + b.A;\n");
    }

    #[test]
    fn drop_tau_at_prefix() {
        let f = fam("agent P11 = 0;\nagent P = tau.'b1wt.P11;");
        let out = apply_rule(&f, &at(RuleId::DropTau, "P")).unwrap();
        assert_eq!(print_process(out.get("P").unwrap()), "'b1wt.P11");
        assert!(apply_rule(&out, &at(RuleId::DropTau, "P")).is_err());
    }

    #[test]
    fn rest_hide_checks_subset() {
        let f = fam("agent A = (a.0 | 'a.0)\\{a};");
        let ok = with(RuleId::RestHide, Some("A"), vec![("K", ParamValue::Set(ActionSet::new(["a"])))]);
        assert_eq!(print_process(apply_rule(&f, &ok).unwrap().get("A").unwrap()), "(a.0 | 'a.0)\\\\{a}\\{a}");
        let bad = with(RuleId::RestHide, Some("A"), vec![("K", ParamValue::Set(ActionSet::new(["a", "b"])))]);
        let err = apply_rule(&f, &bad).unwrap_err();
        assert!(matches!(err, AbstractionError::SideCondition { rule: "rest-hide", .. }), "{err}");
    }

    #[test]
    fn rest_relabel_checks_identity_outside() {
        let f = fam("agent A = (a.0 | c.0)\\{a};");
        let ok = with(RuleId::RestRelabel, Some("A"), vec![("f", ParamValue::Relabelling(Relabelling::from_pairs([("b", "a")])))]);
        assert!(apply_rule(&f, &ok).is_ok());
        let bad = with(RuleId::RestRelabel, Some("A"), vec![("f", ParamValue::Relabelling(Relabelling::from_pairs([("b", "c")])))]);
        assert!(matches!(apply_rule(&f, &bad), Err(AbstractionError::SideCondition { .. })));
    }

    #[test]
    fn hide_prefix_requires_membership() {
        let f = fam("agent A = (a.b.0)\\\\{a};\nagent B = (b.0)\\\\{a};");
        let out = apply_rule(&f, &at(RuleId::HidePrefix, "A")).unwrap();
        assert_eq!(print_process(out.get("A").unwrap()), "tau.(b.0)\\\\{a}");
        assert!(matches!(apply_rule(&f, &at(RuleId::HidePrefix, "B")), Err(AbstractionError::SideCondition { .. })));
        // Complements are hidden too.
        let g = fam("agent A = ('a.0)\\\\{a};");
        assert!(apply_rule(&g, &at(RuleId::HidePrefix, "A")).is_ok());
    }

    #[test]
    fn distribution_rules() {
        let f = fam("agent A = (a.0 + b.0)\\\\{a};\nagent B = (a.0 | b.0)[c/a];\nagent C = (a.0 + b.0)[c/a];");
        let a = apply_rule(&f, &at(RuleId::HideSum, "A")).unwrap();
        assert_eq!(print_process(a.get("A").unwrap()), "(a.0)\\\\{a} + (b.0)\\\\{a}");
        let b = apply_rule(&f, &at(RuleId::RelabelPar, "B")).unwrap();
        assert_eq!(print_process(b.get("B").unwrap()), "(a.0)[c/a] | (b.0)[c/a]");
        let c = apply_rule(&f, &at(RuleId::RelabelSum, "C")).unwrap();
        let c = apply_rule(&c, &at(RuleId::RelabelPrefix, "C:0")).unwrap();
        assert_eq!(print_process(c.get("C").unwrap()), "c.0[c/a] + (b.0)[c/a]");
        assert!(matches!(apply_rule(&f, &at(RuleId::HidePar, "A")), Err(AbstractionError::Mismatch { .. })));
    }

    #[test]
    fn drop_nil_par_both_sides() {
        let f = fam("agent A = a.0 | 0;\nagent B = 0 | b.0;");
        let out = apply_rule(&f, &at(RuleId::DropNilPar, "A")).unwrap();
        let out = apply_rule(&out, &at(RuleId::DropNilPar, "B")).unwrap();
        assert_eq!(print_family(&out), "agent A = a.0;\nagent B = b.0;\n");
    }

    #[test]
    fn drop_unguarded_removes_own_summands() {
        let f = fam("agent K2 = a.K2;\nagent K1 = K1 + a.K2 + K1;");
        let out = apply_rule(&f, &at(RuleId::DropUnguarded, "K1")).unwrap();
        assert_eq!(print_process(out.get("K1").unwrap()), "a.K2");
        let g = fam("agent A = A + A;");
        let g = apply_rule(&g, &at(RuleId::DropUnguarded, "A")).unwrap();
        assert_eq!(print_process(g.get("A").unwrap()), "0");
        assert!(apply_rule(&f, &at(RuleId::DropUnguarded, "K2")).is_err());
    }

    #[test]
    fn fold_fresh_and_existing() {
        let f = fam("agent P1 = a.0;\nagent P13 = enter.exit.'b1wf.P1;");
        let step = with(RuleId::Fold, Some("P13:0.0"), vec![("name", name("P14"))]);
        let out = apply_rule(&f, &step).unwrap();
        assert_eq!(print_family(&out), "agent P1 = a.0;\nagent P14 = 'b1wf.P1;\nagent P13 = enter.exit.P14;\n");
        let again = apply_rule_logged(&f, &with(RuleId::Fold, Some("P1"), vec![("name", name("P13"))])).unwrap();
        assert!(again.note.unwrap().contains("P13_1"));
        let back = fam("agent B = 'b1wf.P1;\nagent P1 = a.0;\nagent P13 = enter.exit.'b1wf.P1;");
        let back = back.with_root("P13").unwrap();
        let out = apply_rule(&back, &with(RuleId::Fold, Some("P13:0.0"), vec![("to", name("B"))])).unwrap();
        assert_eq!(print_process(out.get("P13").unwrap()), "enter.exit.B");
        assert!(apply_rule(&back, &with(RuleId::Fold, Some("P13:0"), vec![("to", name("B"))])).is_err());
    }

    #[test]
    fn fold_into_own_definition_is_refused() {
        let f = fam("agent A = a.0;\nagent B = a.0 + A;");
        let err = apply_rule(&f, &with(RuleId::Fold, Some("A"), vec![("to", name("A"))])).unwrap_err();
        assert!(matches!(err, AbstractionError::SideCondition { .. }), "{err}");
    }

    #[test]
    fn unfold_constant() {
        let f = fam("agent A = a.A;\nagent B = b.A;");
        let out = apply_rule(&f, &at(RuleId::Unfold, "B:0")).unwrap();
        assert_eq!(print_process(out.get("B").unwrap()), "b.a.A");
    }

    #[test]
    fn par_hide_wraps_every_component() {
        let f = fam("agent A = (a.0 | b.0 | k.0)\\{k,a};");
        let step = with(RuleId::ParHide, Some("A"), vec![("K", ParamValue::Set(ActionSet::new(["k"])))]);
        let out = apply_rule(&f, &step).unwrap();
        assert_eq!(print_process(out.get("A").unwrap()), "((a.0)\\\\{k} | (b.0)\\\\{k} | (k.0)\\\\{k})\\{a,k}");
    }

    #[test]
    fn static_unguarded_results_are_refused() {
        let f = fam("agent A = tau.(A | a.0);");
        let err = apply_rule(&f, &at(RuleId::DropTau, "A")).unwrap_err();
        assert!(err.to_string().contains("unguarded"), "{err}");
    }

    #[test]
    fn bad_paths_are_reported() {
        let f = fam("agent A = a.0;");
        assert!(matches!(apply_rule(&f, &at(RuleId::DropTau, "A:3")), Err(AbstractionError::BadPath(_))));
        assert!(matches!(apply_rule(&f, &at(RuleId::DropTau, "Q")), Err(AbstractionError::BadPath(_))));
    }
}
