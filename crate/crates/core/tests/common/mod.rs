//! Seeded generators and brute-force oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use ccsabst_core::abstraction::{all_paths, apply_rule, ParamValue, RuleId, RuleStep};
use ccsabst_core::frontend::Path;
use ccsabst_core::logic::{Formula, LabelSet, ModLabel, Modality};
use ccsabst_core::{build_lts, canonical_state, successors, Action, ActionSet, Family, Lts, Process, Relabelling};
use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const NAMES: [&str; 3] = ["a", "b", "c"];
pub const MAX_STATES: usize = 200;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn action(rng: &mut ChaCha8Rng, tau: bool) -> Action {
    let n = *NAMES.choose(rng).unwrap();
    match rng.gen_range(0..if tau { 5 } else { 4 }) {
        0 | 1 => Action::name(n),
        2 | 3 => Action::coname(n),
        _ => Action::Tau,
    }
}

pub fn action_set(rng: &mut ChaCha8Rng) -> ActionSet {
    let k = rng.gen_range(1..=2);
    ActionSet::new(NAMES.choose_multiple(rng, k).copied())
}

pub fn relabelling(rng: &mut ChaCha8Rng) -> Relabelling {
    let k = rng.gen_range(1..=2);
    let olds: Vec<&str> = NAMES.choose_multiple(rng, k).copied().collect();
    Relabelling::from_pairs(olds.into_iter().map(|o| (*["a", "b", "c", "d"].choose(rng).unwrap(), o)))
}

/// A relabelling that only moves labels of `l` and maps into `l`.
pub fn relabelling_within(rng: &mut ChaCha8Rng, l: &ActionSet) -> Relabelling {
    let labels: Vec<&str> = l.labels().iter().map(|s| &**s).collect();
    let old = *labels.choose(rng).unwrap();
    let new = *labels.choose(rng).unwrap();
    Relabelling::from_pairs([(new, old)])
}

/// Sequential terms: only prefix, choice, constants and, below a prefix,
/// closed static terms. Recursion through these is always finite-state.
fn seq(rng: &mut ChaCha8Rng, depth: usize, consts: &[String], closed: bool) -> Process {
    let leaf = depth >= 4;
    let pick = rng.gen_range(0..if leaf { 3 } else { 10 });
    match pick {
        0 => Process::Nil,
        1 if !closed && !consts.is_empty() => Process::constant(consts.choose(rng).unwrap()),
        1 | 2 => Process::prefix(action(rng, true), if closed || consts.is_empty() { Process::Nil } else { Process::constant(consts.choose(rng).unwrap()) }),
        3..=6 => Process::prefix(action(rng, true), seq(rng, depth + 1, consts, closed)),
        7 | 8 => {
            let k = rng.gen_range(2..=3);
            Process::sum((0..k).map(|_| seq(rng, depth + 1, consts, closed)).collect::<Vec<_>>())
        }
        _ => {
            let inner = seq(rng, depth + 1, consts, true);
            let wrapped = match rng.gen_range(0..4) {
                0 => Process::restrict(inner, action_set(rng)),
                1 => Process::hide(inner, action_set(rng)),
                2 => Process::relabel(inner, relabelling(rng)),
                _ => Process::par(inner, seq(rng, depth + 2, consts, true)),
            };
            Process::prefix(action(rng, true), wrapped)
        }
    }
}

/// Static context over sequential leaves.
fn stat(rng: &mut ChaCha8Rng, depth: usize, pars: &mut usize, consts: &[String]) -> Process {
    let leaf = depth >= 3 || rng.gen_bool(0.35);
    if leaf {
        return if rng.gen_bool(0.6) {
            Process::constant(consts.choose(rng).unwrap())
        } else {
            seq(rng, 2, consts, false)
        };
    }
    match rng.gen_range(0..4) {
        0 if *pars < 2 => {
            *pars += 1;
            let l = stat(rng, depth + 1, pars, consts);
            let r = stat(rng, depth + 1, pars, consts);
            Process::par(l, r)
        }
        0 | 1 => Process::restrict(stat(rng, depth + 1, pars, consts), action_set(rng)),
        2 => Process::hide(stat(rng, depth + 1, pars, consts), action_set(rng)),
        _ => Process::relabel(stat(rng, depth + 1, pars, consts), relabelling(rng)),
    }
}

/// A random family of 1..=4 sequential constants `A0..` plus a root `Sys`
/// with a static body, or `None` if it turned out ill-formed.
pub fn family(rng: &mut ChaCha8Rng) -> Family {
    loop {
        let n = rng.gen_range(1..=4);
        let consts: Vec<String> = (0..n).map(|i| format!("A{i}")).collect();
        let mut defs = IndexMap::new();
        for c in &consts {
            defs.insert(ccsabst_core::action::label(c), seq(rng, 0, &consts, false));
        }
        let mut pars = 0;
        defs.insert(ccsabst_core::action::label("Sys"), stat(rng, 0, &mut pars, &consts));
        if let Ok(f) = Family::new(defs, "Sys") {
            if f.validate().is_ok() {
                return f;
            }
        }
    }
}

/// A family whose LTS is within [`MAX_STATES`], with the LTS.
pub fn small_family(rng: &mut ChaCha8Rng) -> (Family, Lts) {
    loop {
        let f = family(rng);
        if let Some(l) = bounded(&f) {
            return (f, l);
        }
    }
}

pub fn bounded(f: &Family) -> Option<Lts> {
    build_lts(f, MAX_STATES).ok().filter(|l| !l.is_truncated())
}

/// A random explicit LTS with 1..=max_n states.
pub fn explicit_lts(rng: &mut ChaCha8Rng, max_n: usize) -> Lts {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(0..=n * 2);
    let names = ["a", "b"];
    let ts: Vec<(usize, Action, usize)> = (0..m)
        .map(|_| {
            let a = match rng.gen_range(0..3) {
                0 => Action::Tau,
                _ => Action::name(names.choose(rng).unwrap()),
            };
            (rng.gen_range(0..n), a, rng.gen_range(0..n))
        })
        .collect();
    Lts::explicit(n, &ts, 0)
}

fn mod_labels(rng: &mut ChaCha8Rng, weak: bool) -> LabelSet {
    let mut members = BTreeSet::new();
    for _ in 0..rng.gen_range(1..=2) {
        let m = match rng.gen_range(0..4) {
            0 if weak => ModLabel::Eps,
            0 => ModLabel::Act(Action::Tau),
            1 => ModLabel::Act(Action::name("b")),
            _ => ModLabel::Act(Action::name("a")),
        };
        members.insert(m);
    }
    if rng.gen_bool(0.3) {
        LabelSet::complement_of(members)
    } else {
        LabelSet::positive(members)
    }
}

/// A random formula of depth at most `depth` whose free variables are among
/// `bound`. With `weak_box_only` every modality is a weak box.
pub fn formula(rng: &mut ChaCha8Rng, depth: usize, bound: &mut Vec<String>, weak_box_only: bool) -> Formula {
    if depth == 0 {
        return match (bound.is_empty(), rng.gen_range(0..3)) {
            (false, 0 | 1) => Formula::var(bound.choose(rng).unwrap()),
            (_, 0) => Formula::ff(),
            _ => Formula::tt(),
        };
    }
    match rng.gen_range(0..6) {
        0 => Formula::and(formula(rng, depth - 1, bound, weak_box_only), formula(rng, depth - 1, bound, weak_box_only)),
        1 => Formula::or(formula(rng, depth - 1, bound, weak_box_only), formula(rng, depth - 1, bound, weak_box_only)),
        2 | 3 => {
            let kind = if weak_box_only {
                Modality::WeakBox
            } else {
                *[Modality::Box, Modality::Diamond, Modality::WeakBox, Modality::WeakDiamond].choose(rng).unwrap()
            };
            let labels = mod_labels(rng, kind.is_weak());
            Formula::modal(kind, labels, formula(rng, depth - 1, bound, weak_box_only)).unwrap()
        }
        _ => {
            let z = format!("Z{}", bound.len());
            bound.push(z.clone());
            let body = formula(rng, depth - 1, bound, weak_box_only);
            bound.pop();
            if rng.gen_bool(0.5) {
                Formula::nu(&z, body)
            } else {
                Formula::mu(&z, body)
            }
        }
    }
}

pub fn closed_formula(rng: &mut ChaCha8Rng, depth: usize, weak_box_only: bool) -> Formula {
    formula(rng, depth, &mut Vec::new(), weak_box_only)
}

// ---------------------------------------------------------------------------
// Weak transitions by matrix closure, independent of the library's.

pub struct Weak {
    /// eps[s] bit t: s ⇒ε t.
    pub eps: Vec<u64>,
    /// Observable actions seen on transitions.
    pub actions: Vec<Action>,
    /// weak[i][s] bit t: s ⇒a t for a = actions[i].
    pub weak: Vec<Vec<u64>>,
}

pub fn weak(lts: &Lts) -> Weak {
    let n = lts.num_states();
    assert!(n <= 64);
    let mut eps: Vec<u64> = (0..n).map(|s| 1u64 << s).collect();
    loop {
        let mut changed = false;
        for s in 0..n {
            let mut acc = eps[s];
            for u in 0..n {
                if eps[s] >> u & 1 == 1 {
                    for (a, t) in lts.outgoing(u) {
                        if a.is_tau() {
                            acc |= eps[*t];
                        }
                    }
                }
            }
            if acc != eps[s] {
                eps[s] = acc;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let actions: Vec<Action> = lts
        .transitions()
        .filter(|(_, a, _)| !a.is_tau())
        .map(|(_, a, _)| a.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let weak = actions
        .iter()
        .map(|a| {
            (0..n)
                .map(|s| {
                    let mut out = 0u64;
                    for u in bits(eps[s]) {
                        for (b, t) in lts.outgoing(u) {
                            if b == a {
                                out |= eps[*t];
                            }
                        }
                    }
                    out
                })
                .collect()
        })
        .collect();
    Weak { eps, actions, weak }
}

pub fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let i = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(i)
    })
}

// ---------------------------------------------------------------------------
// Brute-force mu-calculus: fixpoints as unions/intersections over the whole
// powerset lattice (Knaster-Tarski), no iteration.

pub fn brute_eval(lts: &Lts, phi: &Formula) -> u64 {
    let w = weak(lts);
    let mut env = Vec::new();
    brute(lts, &w, phi, &mut env)
}

fn brute(lts: &Lts, w: &Weak, phi: &Formula, env: &mut Vec<(String, u64)>) -> u64 {
    let n = lts.num_states();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    match phi {
        Formula::Var(z) => env.iter().rev().find(|(v, _)| **v == **z).map(|(_, s)| *s).expect("closed"),
        Formula::And(l, r) => brute(lts, w, l, env) & brute(lts, w, r, env),
        Formula::Or(l, r) => brute(lts, w, l, env) | brute(lts, w, r, env),
        Formula::Modal(kind, labels, body) => {
            let target = brute(lts, w, body, env);
            let mut out = 0u64;
            for s in 0..n {
                let succ: Vec<u64> = if kind.is_weak() {
                    let mut v = Vec::new();
                    if labels.matches(&ModLabel::Eps) {
                        v.push(w.eps[s]);
                    }
                    for (i, a) in w.actions.iter().enumerate() {
                        if labels.matches(&ModLabel::Act(a.clone())) {
                            v.push(w.weak[i][s]);
                        }
                    }
                    v
                } else {
                    lts.outgoing(s)
                        .iter()
                        .filter(|(a, _)| labels.matches(&ModLabel::Act(a.clone())))
                        .map(|(_, t)| 1u64 << t)
                        .collect()
                };
                let ok = match kind {
                    Modality::Box | Modality::WeakBox => succ.iter().all(|m| m & !target == 0),
                    Modality::Diamond | Modality::WeakDiamond => succ.iter().any(|m| m & target != 0),
                };
                if ok {
                    out |= 1 << s;
                }
            }
            out
        }
        // tt and ff directly; the general case below is exponential.
        Formula::Nu(z, body) if matches!(&**body, Formula::Var(v) if v == z) => full,
        Formula::Mu(z, body) if matches!(&**body, Formula::Var(v) if v == z) => 0,
        Formula::Nu(z, body) => {
            let mut acc = 0u64;
            for cand in 0..=full {
                env.push((z.to_string(), cand));
                let img = brute(lts, w, body, env);
                env.pop();
                if cand & !img == 0 {
                    acc |= cand;
                }
            }
            acc
        }
        Formula::Mu(z, body) => {
            let mut acc = full;
            for cand in 0..=full {
                env.push((z.to_string(), cand));
                let img = brute(lts, w, body, env);
                env.pop();
                if img & !cand == 0 {
                    acc &= cand;
                }
            }
            acc
        }
    }
}

// ---------------------------------------------------------------------------
// Exhaustive weak simulation: is there any relation among all 2^(n*m)
// candidates that is a weak simulation containing the initial pair?

pub fn brute_simulated(left: &Lts, right: &Lts) -> bool {
    let (n, m) = (left.num_states(), right.num_states());
    assert!(n * m <= 16);
    let wl = weak(left);
    let wr = weak(right);
    // Moves as (label index or ε, successor mask); label index in a shared table.
    let moves = |w: &Weak, s: usize| -> Vec<(Option<Action>, u64)> {
        let mut v = vec![(None, w.eps[s])];
        for (i, a) in w.actions.iter().enumerate() {
            if w.weak[i][s] != 0 {
                v.push((Some(a.clone()), w.weak[i][s]));
            }
        }
        v
    };
    let lmoves: Vec<_> = (0..n).map(|s| moves(&wl, s)).collect();
    let rmoves: Vec<_> = (0..m).map(|s| moves(&wr, s)).collect();
    let init = left.initial() * m + right.initial();
    for rel in 0u32..(1u32 << (n * m)) {
        if rel >> init & 1 == 0 {
            continue;
        }
        let row = |p: usize| ((rel >> (p * m)) as u64) & ((1u64 << m) - 1);
        let ok = (0..n * m).filter(|&i| rel >> i & 1 == 1).all(|i| {
            let (p, q) = (i / m, i % m);
            lmoves[p].iter().all(|(a, ps)| {
                let qs = rmoves[q].iter().find(|(b, _)| b == a).map(|(_, qs)| *qs).unwrap_or(0);
                bits(*ps).all(|p2| row(p2) & qs != 0)
            })
        });
        if ok {
            return true;
        }
    }
    false
}

// ---------------------------------------------------------------------------
// Naive reachability: repeat until nothing new.

pub fn reachable_states(f: &Family) -> HashSet<Process> {
    let mut seen: HashSet<Process> = HashSet::new();
    seen.insert(canonical_state(f, &Process::constant(f.root())));
    loop {
        let mut next = seen.clone();
        for s in &seen {
            for (_, t) in successors(f, s).unwrap() {
                next.insert(canonical_state(f, &t));
            }
        }
        if next.len() == seen.len() {
            return seen;
        }
        seen = next;
    }
}

// ---------------------------------------------------------------------------
// Random rule applications.

/// Tries to build a step of `rule` somewhere in `f` that applies.
pub fn random_step(rng: &mut ChaCha8Rng, f: &Family, rule: RuleId) -> Option<(RuleStep, Family)> {
    let mut paths = all_paths(f);
    paths.shuffle(rng);
    if rule == RuleId::Merge {
        let names: Vec<String> = f.defs().keys().map(|k| k.to_string()).collect();
        for _ in 0..6 {
            let a = names.choose(rng)?;
            let b = names.choose(rng)?;
            let params = [
                ("a".to_string(), ParamValue::Name(ccsabst_core::action::label(a))),
                ("b".to_string(), ParamValue::Name(ccsabst_core::action::label(b))),
            ];
            if let Ok(step) = RuleStep::new(rule, None, params) {
                if let Ok(out) = apply_rule(f, &step) {
                    return Some((step, out));
                }
            }
        }
        return None;
    }
    let targets: Vec<Option<Path>> = if rule.target() == ccsabst_core::abstraction::TargetKind::Optional {
        std::iter::once(None).chain(paths.into_iter().map(Some)).collect()
    } else {
        paths.into_iter().map(Some).collect()
    };
    for target in targets.into_iter().take(40) {
        let node = target.as_ref().map(|t| t.resolve(f).unwrap().clone());
        let params = params_for(rng, f, rule, node.as_ref());
        let Ok(step) = RuleStep::new(rule, target, params) else { continue };
        if let Ok(out) = apply_rule(f, &step) {
            return Some((step, out));
        }
    }
    None
}

fn params_for(rng: &mut ChaCha8Rng, f: &Family, rule: RuleId, node: Option<&Process>) -> Vec<(String, ParamValue)> {
    let restricted = match node {
        Some(Process::Restrict(_, l)) => Some(l.clone()),
        _ => None,
    };
    let subset = |rng: &mut ChaCha8Rng, l: &ActionSet| {
        let labels: Vec<&str> = l.labels().iter().map(|s| &**s).collect();
        let k = rng.gen_range(1..=labels.len());
        ActionSet::new(labels.choose_multiple(rng, k).copied())
    };
    match rule {
        RuleId::RestHide | RuleId::ParHide => {
            let k = match &restricted {
                Some(l) if rng.gen_bool(0.9) => subset(rng, l),
                _ => action_set(rng),
            };
            vec![("K".into(), ParamValue::Set(k))]
        }
        RuleId::RestRelabel | RuleId::ParRelabel => {
            let r = match &restricted {
                Some(l) if rng.gen_bool(0.9) => relabelling_within(rng, l),
                _ => relabelling(rng),
            };
            vec![("f".into(), ParamValue::Relabelling(r))]
        }
        RuleId::Fold => {
            let same: Vec<String> =
                f.defs().iter().filter(|(_, b)| Some(*b) == node).map(|(n, _)| n.to_string()).collect();
            match same.choose(rng) {
                Some(n) if rng.gen_bool(0.5) => vec![("to".into(), ParamValue::Name(ccsabst_core::action::label(n)))],
                _ => vec![("name".into(), ParamValue::Name(ccsabst_core::action::label("F")))],
            }
        }
        _ => vec![],
    }
}

/// Families tailored so that `rule` has somewhere to match.
pub fn family_for(rng: &mut ChaCha8Rng, rule: RuleId) -> Family {
    let (mut f, _) = small_family(rng);
    let seed = |rng: &mut ChaCha8Rng| seq(rng, 2, &["A0".to_string()], false);
    let extra = match rule {
        RuleId::HidePrefix | RuleId::HideSum | RuleId::HidePar | RuleId::PushHide => {
            let body = match rule {
                RuleId::HidePrefix => {
                    let a = action(rng, false);
                    let k = ActionSet::new([&**a.label().unwrap()]);
                    return with_sys(&f, Process::hide(Process::prefix(a, seed(rng)), k), rng);
                }
                RuleId::HideSum => Process::sum([seed(rng), seed(rng)]),
                RuleId::HidePar => Process::par(seed(rng), seed(rng)),
                _ => seed(rng),
            };
            Process::hide(body, action_set(rng))
        }
        RuleId::RelabelPrefix | RuleId::RelabelSum | RuleId::RelabelPar | RuleId::PushRelabel => {
            let body = match rule {
                RuleId::RelabelPrefix => Process::prefix(action(rng, true), seed(rng)),
                RuleId::RelabelSum => Process::sum([seed(rng), seed(rng)]),
                RuleId::RelabelPar => Process::par(seed(rng), seed(rng)),
                _ => seed(rng),
            };
            Process::relabel(body, relabelling(rng))
        }
        RuleId::DropNilPar => {
            if rng.gen_bool(0.5) {
                Process::par(seed(rng), Process::Nil)
            } else {
                Process::par(Process::Nil, seed(rng))
            }
        }
        RuleId::DropTau | RuleId::RemoveTauAll => Process::prefix(Action::Tau, seed(rng)),
        RuleId::DropUnguarded => {
            let body = f.get("A0").unwrap().clone();
            let mut out = f.clone();
            out = replace_def(&out, "A0", Process::sum([Process::constant("A0"), body]));
            if out.validate().is_ok() {
                f = out;
            }
            return f;
        }
        RuleId::ParHide | RuleId::ParRelabel | RuleId::RestHide | RuleId::RestRelabel => {
            Process::restrict(Process::par(seed(rng), seed(rng)), action_set(rng))
        }
        _ => return f,
    };
    with_sys(&f, extra, rng)
}

fn replace_def(f: &Family, name: &str, body: Process) -> Family {
    let mut defs = f.defs().clone();
    defs.insert(ccsabst_core::action::label(name), body);
    Family::new(defs, f.root()).unwrap()
}

/// Puts `extra` in parallel with (or instead of) the root body.
fn with_sys(f: &Family, extra: Process, rng: &mut ChaCha8Rng) -> Family {
    let sys = f.get("Sys").unwrap().clone();
    let body = if rng.gen_bool(0.5) { Process::par(sys, extra) } else { extra };
    let out = replace_def(f, "Sys", body);
    if out.validate().is_ok() && bounded(&out).is_some() {
        out
    } else {
        f.clone()
    }
}

// ---------------------------------------------------------------------------
// Suites shared by the property tests and the acceptance target.

#[derive(Debug, Default)]
pub struct Suite {
    pub cases: usize,
    pub violations: usize,
    /// Cases where the interesting premise held (e.g. E' ⊨ φ).
    pub nontrivial: usize,
    pub first_failure: Option<String>,
}

impl Suite {
    fn fail(&mut self, what: String) {
        self.violations += 1;
        self.first_failure.get_or_insert(what);
    }
}

/// Model checker against the powerset-lattice evaluator on explicit LTSs of
/// at most 5 states and formulas of depth at most 4.
pub fn mu_oracle_suite(cases: usize, seed: u64) -> Suite {
    let mut s = Suite::default();
    let mut rng = rng(seed);
    while s.cases < cases {
        let lts = explicit_lts(&mut rng, 5);
        let phi = closed_formula(&mut rng, 4, false);
        let got = ccsabst_core::logic::check_table(&lts, &phi).unwrap();
        let got: u64 = got.ones().map(|i| 1u64 << i).sum();
        let want = brute_eval(&lts, &phi);
        s.cases += 1;
        if want & 1 == 1 {
            s.nontrivial += 1;
        }
        if got != want {
            s.fail(format!("{phi} on {lts:?}: got {got:b}, want {want:b}"));
        }
    }
    s
}

/// Simulation checker against exhaustive relation enumeration on LTS pairs
/// of at most 4 states each.
pub fn sim_oracle_suite(cases: usize, seed: u64) -> Suite {
    let mut s = Suite::default();
    let mut rng = rng(seed);
    while s.cases < cases {
        let l = explicit_lts(&mut rng, 4);
        let r = explicit_lts(&mut rng, 4);
        let got = ccsabst_core::simulation::weakly_simulated_by(&l, &r).unwrap();
        let want = brute_simulated(&l, &r);
        s.cases += 1;
        if want {
            s.nontrivial += 1;
        }
        if got.holds != want {
            s.fail(format!("{l:?} vs {r:?}: got {}, want {want}", got.holds));
        }
        if let Some(w) = &got.witness {
            if !ccsabst_core::simulation::audit_witness(&l, &r, w) {
                s.fail(format!("witness fails audit: {l:?} vs {r:?}"));
            }
        }
    }
    s
}

const SOUND_RULES: [RuleId; 19] = RuleId::ALL;

/// A pair E ≤ E': a random rule step, or E' = E + G.
fn related_pair(rng: &mut ChaCha8Rng) -> Option<(Family, Family)> {
    let (f, _) = small_family(rng);
    if rng.gen_bool(0.3) {
        let g = seq(rng, 2, &[], true);
        let body = Process::sum([f.get("Sys").unwrap().clone(), g]);
        let out = replace_def(&f, "Sys", body);
        return bounded(&out).map(|_| (f, out));
    }
    let rule = *SOUND_RULES.choose(rng).unwrap();
    let f = family_for(rng, rule);
    let (_, after) = random_step(rng, &f, rule)?;
    bounded(&after)?;
    Some((f, after))
}

fn context(rng: &mut ChaCha8Rng, hole: Process) -> Process {
    let g = seq(rng, 2, &[], true);
    match rng.gen_range(0..6) {
        0 => Process::prefix(action(rng, true), hole),
        1 => Process::sum([hole, g]),
        2 => Process::par(hole, g),
        3 => Process::restrict(hole, action_set(rng)),
        4 => Process::relabel(hole, relabelling(rng)),
        _ => Process::hide(hole, action_set(rng)),
    }
}

fn with_root_body(f: &Family, name: &str, body: Process) -> Option<Family> {
    let mut defs = f.defs().clone();
    defs.insert(ccsabst_core::action::label(name), body);
    Family::new(defs, name).ok().filter(|f| f.validate().is_ok() && f.static_unguarded_cycle().is_none())
}

/// For E ≤ E' and a single-operator context C: C[E] ≤ C[E'].
pub fn congruence_suite(cases: usize, seed: u64) -> Suite {
    let mut s = Suite::default();
    let mut rng = rng(seed);
    while s.cases < cases {
        let Some((e, e2)) = related_pair(&mut rng) else { continue };
        let (Some(l), Some(r)) = (bounded(&e), bounded(&e2)) else { continue };
        if !ccsabst_core::simulation::weakly_simulated_by(&l, &r).unwrap().holds {
            continue;
        }
        let mut crng = rng.clone();
        let c1 = context(&mut rng, Process::constant("Sys"));
        let c2 = context(&mut crng, Process::constant("Sys"));
        debug_assert_eq!(c1, c2);
        let (Some(ce), Some(ce2)) = (with_root_body(&e, "Ctx", c1), with_root_body(&e2, "Ctx", c2)) else { continue };
        let (Some(l), Some(r)) = (bounded(&ce), bounded(&ce2)) else { continue };
        s.cases += 1;
        let holds = ccsabst_core::simulation::weakly_simulated_by(&l, &r).unwrap().holds;
        if holds {
            s.nontrivial += 1;
        } else {
            s.fail(format!("context breaks ≤:\n{}\nvs\n{}", ccsabst_core::frontend::print_family(&ce), ccsabst_core::frontend::print_family(&ce2)));
        }
    }
    s
}

/// For E' reached from E by 1..=3 rule steps and a closed weak-box formula
/// φ: E' ⊨ φ implies E ⊨ φ.
pub fn preservation_suite(cases: usize, seed: u64) -> Suite {
    let mut s = Suite::default();
    let mut rng = rng(seed);
    while s.cases < cases {
        let rule = *SOUND_RULES.choose(&mut rng).unwrap();
        let e = family_for(&mut rng, rule);
        let mut cur = e.clone();
        let mut chain = Vec::new();
        for i in 0..rng.gen_range(1..=3) {
            let r = if i == 0 { rule } else { *SOUND_RULES.choose(&mut rng).unwrap() };
            if let Some((step, next)) = random_step(&mut rng, &cur, r) {
                chain.push(step.to_string());
                cur = next;
            }
        }
        if chain.is_empty() {
            continue;
        }
        let (Some(l), Some(r)) = (bounded(&e), bounded(&cur)) else { continue };
        let phi = closed_formula(&mut rng, 4, true);
        s.cases += 1;
        let after = ccsabst_core::logic::check(&r, &phi).unwrap();
        let before = ccsabst_core::logic::check(&l, &phi).unwrap();
        if after {
            s.nontrivial += 1;
            if !before {
                s.fail(format!("{phi} holds after {chain:?} but not before:\n{}", ccsabst_core::frontend::print_family(&e)));
            }
        }
    }
    s
}

/// `before ≤ after` for random applicable instances of one rule.
pub fn rule_soundness_suite(rule: RuleId, cases: usize, seed: u64) -> Suite {
    let mut s = Suite::default();
    let mut rng = rng(seed);
    let mut attempts = 0;
    while s.cases < cases && attempts < cases * 200 {
        attempts += 1;
        let f = family_for(&mut rng, rule);
        let Some((step, after)) = random_step(&mut rng, &f, rule) else { continue };
        let (Some(l), Some(r)) = (bounded(&f), bounded(&after)) else { continue };
        s.cases += 1;
        if f != after {
            s.nontrivial += 1;
        }
        if !ccsabst_core::simulation::weakly_simulated_by(&l, &r).unwrap().holds {
            s.fail(format!("{step} unsound on\n{}", ccsabst_core::frontend::print_family(&f)));
        }
    }
    s
}

/// The LTS of `f`, which must fit in `max_states`.
pub fn bounded_with(f: &Family, max_states: usize) -> Lts {
    let l = build_lts(f, max_states).unwrap();
    assert!(!l.is_truncated(), "more than {max_states} states");
    l
}
