use std::fmt;

use thiserror::Error;

use crate::error::{AbstractionError, SimulationError};
use crate::lts::{build_lts, Lts};
use crate::process::Family;
use crate::simulation::weakly_simulated_by;

use super::rules::apply_rule_logged;
use super::step::{RuleStep, Script};

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub certify: bool,
    pub max_states: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { certify: false, max_states: crate::lts::DEFAULT_MAX_STATES }
    }
}

/// Outcome of checking `before ≤ after` for one step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certification {
    Certified,
    Failed,
    Skipped,
    Pending,
    /// The check could not run, e.g. because an LTS was truncated.
    Refused(String),
}

impl fmt::Display for Certification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certification::Certified => f.write_str("certified"),
            Certification::Failed => f.write_str("failed"),
            Certification::Skipped => f.write_str("skipped"),
            Certification::Pending => f.write_str("pending"),
            Certification::Refused(why) => write!(f, "refused ({why})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct StepRecord {
    pub index: usize,
    pub step: RuleStep,
    pub family: Family,
    /// State count of the snapshot, `None` when the bound was exceeded.
    pub states: Option<usize>,
    pub certification: Certification,
    pub chain: Vec<String>,
    pub note: Option<String>,
}

#[derive(Clone, Debug)]
pub struct ScriptRun {
    pub initial_states: Option<usize>,
    pub log: Vec<StepRecord>,
    pub family: Family,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {index} (`{step}`): {source}")]
pub struct ScriptError {
    /// 1-based.
    pub index: usize,
    pub step: RuleStep,
    #[source]
    pub source: AbstractionError,
}

/// Builds the LTS of `family`, or `None` when truncated or ill-formed.
pub fn bounded_lts(family: &Family, max_states: usize) -> Option<Lts> {
    build_lts(family, max_states).ok().filter(|l| !l.is_truncated())
}

/// Certifies `before ≤ after` given their LTSs.
pub fn certify(before: Option<&Lts>, after: Option<&Lts>) -> Certification {
    match (before, after) {
        (Some(l), Some(r)) => match weakly_simulated_by(l, r) {
            Ok(res) if res.holds => Certification::Certified,
            Ok(_) => Certification::Failed,
            Err(e) => Certification::Refused(e.to_string()),
        },
        _ => Certification::Refused(SimulationError::Truncated.to_string()),
    }
}

/// Applies the steps in order. The first failing step aborts the run.
pub fn run_script(family: &Family, script: &Script, opts: &RunOptions) -> Result<ScriptRun, ScriptError> {
    let mut current = family.clone();
    let mut lts = bounded_lts(&current, opts.max_states);
    let initial_states = lts.as_ref().map(Lts::num_states);
    let mut log = Vec::with_capacity(script.steps.len());
    for (i, step) in script.steps.iter().enumerate() {
        let applied = apply_rule_logged(&current, step).map_err(|source| ScriptError {
            index: i + 1,
            step: step.clone(),
            source,
        })?;
        let next_lts = bounded_lts(&applied.family, opts.max_states);
        let certification = if opts.certify { certify(lts.as_ref(), next_lts.as_ref()) } else { Certification::Skipped };
        log.push(StepRecord {
            index: i + 1,
            step: step.clone(),
            family: applied.family.clone(),
            states: next_lts.as_ref().map(Lts::num_states),
            certification,
            chain: applied.chain,
            note: applied.note,
        });
        current = applied.family;
        lts = next_lts;
    }
    Ok(ScriptRun { initial_states, log, family: current })
}
