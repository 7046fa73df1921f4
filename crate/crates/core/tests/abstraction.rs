mod common;

use ccsabst_core::abstraction::{
    apply_rule, apply_rule_logged, list_applicable, run_script, Certification, ParamValue, RuleId, RuleStep, RunOptions, Script,
};
use ccsabst_core::action::label;
use ccsabst_core::frontend::{parse_ccs, parse_script, print_family, print_process, Path};
use ccsabst_core::simulation::weakly_simulated_by;
use ccsabst_core::{corpus, AbstractionError, ActionSet, Family, Process, Relabelling};
use proptest::prelude::*;

fn fam(src: &str) -> Family {
    parse_ccs(src).unwrap().family
}

fn path(s: &str) -> Path {
    s.parse().unwrap()
}

fn step(rule: RuleId, target: Option<&str>, params: Vec<(&str, ParamValue)>) -> RuleStep {
    RuleStep::new(rule, target.map(path), params.into_iter().map(|(k, v)| (k.to_string(), v))).unwrap()
}

fn set(names: &[&str]) -> ParamValue {
    ParamValue::Set(ActionSet::new(names.iter().copied()))
}

fn applicable_rules(f: &Family, at: &str) -> Vec<(RuleId, bool)> {
    list_applicable(f, &path(at)).unwrap().into_iter().map(|a| (a.rule, a.ready)).collect()
}

#[test]
fn every_rule_is_sound_on_random_instances() {
    let mut bad = Vec::new();
    for (i, rule) in RuleId::ALL.into_iter().enumerate() {
        let s = common::rule_soundness_suite(rule, 120, 0xab5 + i as u64);
        assert!(s.cases >= 100, "{rule}: only {} applicable instances", s.cases);
        if s.violations > 0 {
            bad.push(format!("{rule}: {}", s.first_failure.unwrap()));
        }
    }
    assert!(bad.is_empty(), "{}", bad.join("\n"));
}

#[test]
fn nested_sites_are_sound() {
    let mut rng = common::rng(0x4e57);
    let mut nested = 0;
    for attempt in 0..20_000 {
        if nested >= 300 {
            break;
        }
        let rule = RuleId::ALL[attempt % RuleId::ALL.len()];
        let f = common::family_for(&mut rng, rule);
        let Some((st, after)) = common::random_step(&mut rng, &f, rule) else { continue };
        if st.target.as_ref().is_none_or(|t| t.steps.is_empty()) {
            continue;
        }
        let (Some(l), Some(r)) = (common::bounded(&f), common::bounded(&after)) else { continue };
        nested += 1;
        assert!(weakly_simulated_by(&l, &r).unwrap().holds, "{st} on\n{}", print_family(&f));
    }
    assert!(nested >= 300, "only {nested} nested instances");
}

#[test]
fn merge_example() {
    let f = fam("agent A = a.B;\nagent B = b.A;");
    let st = step(RuleId::Merge, None, vec![("a", ParamValue::Name(label("A"))), ("b", ParamValue::Name(label("B")))]);
    assert_eq!(print_family(&apply_rule(&f, &st).unwrap()), "agent A = a.A + b.A;\n");
}

#[test]
fn drop_tau_example() {
    let f = fam("agent P11 = 0;\nagent P = tau.'b1wt.P11;");
    let out = apply_rule(&f, &RuleStep::at(RuleId::DropTau, path("P")).unwrap()).unwrap();
    assert_eq!(print_process(out.get("P").unwrap()), "'b1wt.P11");
}

#[test]
fn par_hide_on_dekker() {
    let entry = corpus::load("dekker").unwrap();
    let f = &entry.model.family;
    let st = step(RuleId::ParHide, Some("Dekker"), vec![("K", set(&["kr1", "kw1", "kr2", "kw2"]))]);
    let out = apply_rule(f, &st).unwrap();
    let body = print_process(out.get("Dekker").unwrap());
    for c in ["P1", "P2", "B1f", "B2f", "K1"] {
        assert!(body.contains(&format!("{c}\\\\{{kr1,kr2,kw1,kw2}}")), "{body}");
    }
    assert!(weakly_simulated_by(&common::bounded_with(f, 1000), &common::bounded_with(&out, 1000)).unwrap().holds);
    // enter1 is visible, so it may not be hidden under the restriction.
    let bad = step(RuleId::ParHide, Some("Dekker"), vec![("K", set(&["enter1"]))]);
    assert!(matches!(apply_rule(f, &bad), Err(AbstractionError::SideCondition { .. })));
}

#[test]
fn listing_examples() {
    let f = fam("agent A = a.0;\nagent S = tau.A + (A | 0) + a.A;");
    let at_tau = applicable_rules(&f, "S:0");
    assert!(at_tau.contains(&(RuleId::DropTau, true)));
    assert!(at_tau.contains(&(RuleId::Fold, true)));
    let at_par = applicable_rules(&f, "S:1");
    assert!(at_par.contains(&(RuleId::DropNilPar, true)));
    let at_prefix = applicable_rules(&f, "S:2");
    assert!(!at_prefix.iter().any(|(r, _)| *r == RuleId::Unfold));
    assert!(at_prefix.contains(&(RuleId::Fold, true)));
    let at_const = applicable_rules(&f, "S:2.0");
    assert!(at_const.contains(&(RuleId::Unfold, true)));
    assert!(list_applicable(&f, &path("S:7")).is_err());
    // Every ready entry really applies.
    for p in ["S", "S:0", "S:1", "S:2", "S:2.0", "A"] {
        for a in list_applicable(&f, &path(p)).unwrap().into_iter().filter(|a| a.ready) {
            assert!(apply_rule(&f, a.step.as_ref().unwrap()).is_ok(), "{:?}", a);
        }
    }
}

#[test]
fn not_ready_entries_say_why() {
    let f = fam("agent S = (a.0 | 'a.0)\\{a};");
    let listed = list_applicable(&f, &path("S")).unwrap();
    let rest_hide = listed.iter().find(|a| a.rule == RuleId::RestHide).unwrap();
    assert!(!rest_hide.ready);
    assert!(rest_hide.reason.as_ref().unwrap().contains("K"));
}

#[test]
fn empty_script_is_identity() {
    let f = fam("agent A = a.A;");
    let run = run_script(&f, &Script::default(), &RunOptions { certify: true, max_states: 100 }).unwrap();
    assert!(run.log.is_empty());
    assert_eq!(run.family, f);
    assert_eq!(run.initial_states, Some(1));
}

#[test]
fn failing_step_reports_its_index() {
    let f = fam("agent A = tau.a.A;");
    let script = parse_script("step drop-tau target=A\nstep drop-tau target=A").unwrap();
    let err = run_script(&f, &script, &RunOptions::default()).unwrap_err();
    assert_eq!(err.index, 2);
    assert!(err.to_string().contains("step 2"));
}

#[test]
fn safety_script_reaches_sixteen_states_certified() {
    let entry = corpus::load("dekker1").unwrap();
    let opts = RunOptions { certify: true, max_states: 10_000 };
    let run = run_script(&entry.model.family, &entry.scripts["dekker-safety"], &opts).unwrap();
    assert_eq!(run.log.len(), 21);
    assert_eq!(run.log.last().unwrap().states, Some(16));
    assert!(run.log.iter().all(|r| r.certification == Certification::Certified));
}

#[test]
fn replay_is_byte_identical() {
    for (id, name) in [("dekker1", "dekker-safety"), ("dekker-live", "dekker-live")] {
        let entry = corpus::load(id).unwrap();
        let opts = RunOptions { certify: false, max_states: 10_000 };
        let snap = |_| {
            let run = run_script(&entry.model.family, &entry.scripts[name], &opts).unwrap();
            run.log.iter().map(|r| (print_family(&r.family), r.states, r.chain.clone())).collect::<Vec<_>>()
        };
        assert_eq!(snap(0), snap(1), "{id}");
    }
}

#[test]
fn macro_chains_use_catalog_steps_only() {
    const ALLOWED: &[&str] = &[
        "hide-prefix",
        "hide-sum",
        "hide-par",
        "relabel-prefix",
        "relabel-sum",
        "relabel-par",
        "hide-through-prefix",
        "drop-nil-wrapper",
        "wrapper-through-restriction",
        "relabel-through-hiding",
        "drop-tau",
    ];
    let f = fam("agent A = k.b.A + a.'c.A + tau.(k.0 | 'c.0);\nagent T = (A)\\\\{k};\nagent U = (T)[d/b];");
    for (rule, root) in [(RuleId::PushHide, "T"), (RuleId::PushRelabel, "U"), (RuleId::RemoveTauAll, "T")] {
        let f = f.with_root(root).unwrap();
        let st = RuleStep::new(rule, None, []).unwrap();
        let applied = apply_rule_logged(&f, &st).unwrap();
        assert!(!applied.chain.is_empty(), "{rule}");
        for link in &applied.chain {
            let head = link.split_whitespace().next().unwrap();
            assert!(ALLOWED.contains(&head) || head == "fold" || head == "unfold", "{rule}: {link}");
        }
        let (l, r) = (common::bounded_with(&f, 1000), common::bounded_with(&applied.family, 1000));
        assert!(weakly_simulated_by(&l, &r).unwrap().holds);
    }
}

#[test]
fn fold_cannot_collapse_a_definition_onto_itself() {
    // A0 already reaches itself unguardedly; folding its whole body into A0
    // would leave `A0 = A0` and lose every move.
    let f = fam("agent A0 = b.A0 + tau.a.A0 + A0;");
    let st = step(RuleId::Fold, Some("A0"), vec![("to", ParamValue::Name(label("A0")))]);
    assert!(matches!(apply_rule(&f, &st), Err(AbstractionError::SideCondition { .. })));
    // Guarded folds into a recursive definition are fine.
    let g = fam("agent A = a.b.A;\nagent B = b.A;");
    let ok = step(RuleId::Fold, Some("A:0"), vec![("to", ParamValue::Name(label("B")))]);
    assert_eq!(print_process(apply_rule(&g, &ok).unwrap().get("A").unwrap()), "a.B");
}

fn names_subset(mask: u8) -> Vec<&'static str> {
    ["a", "b", "c", "d"].into_iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, n)| n).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn restriction_side_conditions_are_enforced(l in 1u8..16, k in 1u8..16) {
        let l_names = names_subset(l);
        let k_names = names_subset(k);
        let src = format!("agent S = (a.b.0 | 'c.d.0)\\{{{}}};", l_names.join(","));
        let f = fam(&src);
        let ok = k & !l == 0;
        for rule in [RuleId::RestHide, RuleId::ParHide] {
            let res = apply_rule(&f, &step(rule, Some("S"), vec![("K", set(&k_names))]));
            prop_assert_eq!(res.is_ok(), ok, "{} K={:?} L={:?}", rule, k_names, l_names);
            if let Err(e) = res {
                let is_side = matches!(e, AbstractionError::SideCondition { .. });
                prop_assert!(is_side);
            }
        }
        // A relabelling touching a name outside L must be refused.
        let outside: Vec<&str> = ["a", "b", "c", "d"].into_iter().filter(|n| !l_names.contains(n)).collect();
        if let Some(o) = outside.first() {
            let f_rel = Relabelling::from_pairs([("z", *o)]);
            for rule in [RuleId::RestRelabel, RuleId::ParRelabel] {
                let res = apply_rule(&f, &step(rule, Some("S"), vec![("f", ParamValue::Relabelling(f_rel.clone()))]));
                prop_assert!(res.is_err());
            }
        }
    }

    #[test]
    fn hide_prefix_requires_the_action_hidden(act in "[a-d]", l in 1u8..16) {
        let l_names = names_subset(l);
        let f = fam(&format!("agent S = ({act}.0)\\\\{{{}}};", l_names.join(",")));
        let res = apply_rule(&f, &RuleStep::at(RuleId::HidePrefix, path("S")).unwrap());
        prop_assert_eq!(res.is_ok(), l_names.contains(&act.as_str()));
    }

    #[test]
    fn shape_mismatch_is_an_error_not_a_no_op(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let (f, _) = common::small_family(&mut rng);
        for p in ccsabst_core::abstraction::all_paths(&f) {
            let node = p.resolve(&f).unwrap().clone();
            let st = RuleStep::at(RuleId::DropTau, p.clone()).unwrap();
            let res = apply_rule(&f, &st);
            let is_tau = matches!(&node, Process::Prefix(a, _) if a.is_tau());
            prop_assert_eq!(res.is_ok(), is_tau, "{} at {}", print_process(&node), p);
        }
    }
}
