//! Simulation-sound rewrite rules on definition families, addressed by
//! subterm paths, plus script execution with optional certification.

mod applicable;
mod macros;
mod rules;
mod run;
mod step;

pub use applicable::{list_applicable, Applicable};
pub use rules::{all_paths, apply_rule, apply_rule_logged, Applied};
pub use run::{bounded_lts, certify, run_script, Certification, RunOptions, ScriptError, ScriptRun, StepRecord};
pub use step::{ParamKind, ParamSpec, ParamValue, RuleId, RuleStep, Script, TargetKind};
