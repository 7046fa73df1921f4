use ccsabst_core::abstraction::{apply_rule_logged, bounded_lts, Certification, ParamKind, ParamValue, RuleId, RuleStep, Script};
use ccsabst_core::action::label;
use ccsabst_core::frontend::{parse_action_set, parse_ccs, parse_mu, parse_relabelling, print_family, print_script, MuSource, Path};
use ccsabst_core::{Family, Lts};

use crate::error::ApiError;

/// One applied step and the snapshot it produced.
#[derive(Clone, Debug)]
pub struct Entry {
    /// Unique within the session, so late certification results can find
    /// their entry even after undo and redo.
    pub seq: u64,
    pub step: RuleStep,
    pub family: Family,
    pub states: Option<usize>,
    pub certification: Certification,
    pub chain: Vec<String>,
    pub note: Option<String>,
}

#[derive(Debug)]
pub struct Session {
    pub id: String,
    pub initial: Family,
    pub initial_states: Option<usize>,
    pub props: MuSource,
    pub history: Vec<Entry>,
    next_seq: u64,
}

impl Session {
    pub fn new(id: String, ccs: &str, mu: Option<&str>, root: Option<&str>, max_states: usize) -> Result<Self, ApiError> {
        let src = parse_ccs(ccs).map_err(|e| ApiError::parse("ccs", e))?;
        let initial = match root {
            Some(r) => src.family.with_root(r)?,
            None => src.family,
        };
        let props = match mu {
            Some(text) => parse_mu(text, &src.sets).map_err(|e| ApiError::parse("mu", e))?,
            None => MuSource { sets: src.sets, ..MuSource::default() },
        };
        let initial_states = bounded_lts(&initial, max_states).map(|l| l.num_states());
        Ok(Session { id, initial, initial_states, props, history: Vec::new(), next_seq: 0 })
    }

    pub fn current(&self) -> &Family {
        self.history.last().map_or(&self.initial, |e| &e.family)
    }

    pub fn current_states(&self) -> Option<usize> {
        self.history.last().map_or(self.initial_states, |e| e.states)
    }

    /// Snapshot `index`: 0 is the initial family, `i` the family after step `i`.
    pub fn snapshot(&self, index: usize) -> Option<&Family> {
        match index {
            0 => Some(&self.initial),
            i => self.history.get(i - 1).map(|e| &e.family),
        }
    }

    /// Applies `step` to the current snapshot. The new entry is `Pending`
    /// when `certify`, otherwise `Skipped`.
    pub fn apply(&mut self, step: RuleStep, certify: bool, max_states: usize) -> Result<&Entry, ApiError> {
        let applied = apply_rule_logged(self.current(), &step)?;
        let states = bounded_lts(&applied.family, max_states).map(|l| l.num_states());
        let seq = self.next_seq;
        self.next_seq += 1;
        self.history.push(Entry {
            seq,
            step,
            family: applied.family,
            states,
            certification: if certify { Certification::Pending } else { Certification::Skipped },
            chain: applied.chain,
            note: applied.note,
        });
        Ok(self.history.last().unwrap())
    }

    pub fn undo(&mut self) -> Result<Entry, ApiError> {
        self.history.pop().ok_or_else(|| ApiError::conflict("nothing to undo"))
    }

    /// Records a finished certification if the entry is still in the history.
    pub fn resolve(&mut self, seq: u64, result: Certification) {
        if let Some(e) = self.history.iter_mut().find(|e| e.seq == seq) {
            e.certification = result;
        }
    }

    /// The families a certification of entry `seq` compares.
    pub fn certification_pair(&self, seq: u64) -> Option<(Family, Family)> {
        let i = self.history.iter().position(|e| e.seq == seq)?;
        Some((self.snapshot(i)?.clone(), self.history[i].family.clone()))
    }

    pub fn script(&self) -> Script {
        Script { steps: self.history.iter().map(|e| e.step.clone()).collect() }
    }

    /// The initial family and the script that reproduces the session.
    pub fn export(&self) -> (String, String) {
        (print_family(&self.initial), print_script(&self.script()))
    }
}

/// The LTS of `family`, or 422 when it exceeds `max_states`.
pub fn lts_within(family: &Family, max_states: usize) -> Result<Lts, ApiError> {
    let l = ccsabst_core::build_lts(family, max_states)?;
    if l.is_truncated() {
        return Err(ApiError::truncated(format!("the LTS has more than {max_states} states")));
    }
    Ok(l)
}

/// Builds a step from the wire form: rule id, optional path text and
/// parameters written as in scripts (`{a,b}`, `[new/old]`, names).
pub fn build_step(rule: &str, target: Option<&str>, params: &[(String, String)]) -> Result<RuleStep, ApiError> {
    let rule: RuleId = rule.parse().map_err(ApiError::bad_request)?;
    let target = target.map(|t| t.parse::<Path>().map_err(ApiError::bad_request)).transpose()?;
    let mut typed = Vec::new();
    for (k, v) in params {
        let spec = rule
            .params()
            .iter()
            .find(|s| s.name == k)
            .ok_or_else(|| ApiError::bad_request(format!("rule {rule} has no parameter `{k}`")))?;
        let value = match spec.kind {
            ParamKind::Set => ParamValue::Set(parse_action_set(v).map_err(|e| ApiError::parse(k, e))?),
            ParamKind::Relabelling => ParamValue::Relabelling(parse_relabelling(v).map_err(|e| ApiError::parse(k, e))?),
            ParamKind::Constant => ParamValue::Name(label(v.trim())),
        };
        typed.push((k.clone(), value));
    }
    RuleStep::new(rule, target, typed).map_err(|e| ApiError::bad_request(e.to_string()))
}
