//! Python bindings: `import ccsabst`.
//!
//! Errors raise `ccsabst.CcsabstError` (a `ValueError`); exceeding the state
//! bound raises its subclass `ccsabst.TruncatedError`.

use ccsabst_core::abstraction::{apply_rule_logged, list_applicable, run_script, RunOptions, RuleStep};
use ccsabst_core::frontend::{parse_ccs, parse_mu, parse_script, print_family, CcsSource, Path};
use ccsabst_core::logic::{check, classify as classify_formula};
use ccsabst_core::simulation::weakly_simulated_by;
use ccsabst_core::{build_lts, corpus, Lts, DEFAULT_MAX_STATES};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(ccsabst, CcsabstError, PyValueError);
create_exception!(ccsabst, TruncatedError, CcsabstError);

fn err(e: impl std::fmt::Display) -> PyErr {
    CcsabstError::new_err(e.to_string())
}

/// A parsed process file with a chosen root.
#[pyclass(frozen, skip_from_py_object, module = "ccsabst")]
#[derive(Clone)]
pub struct Model {
    src: CcsSource,
}

impl Model {
    fn lts(&self, max_states: usize) -> PyResult<Lts> {
        let l = build_lts(&self.src.family, max_states).map_err(err)?;
        if l.is_truncated() {
            return Err(TruncatedError::new_err(format!("{}: more than {max_states} states", self.src.family.root())));
        }
        Ok(l)
    }

    fn with_family(&self, family: ccsabst_core::Family) -> Model {
        Model { src: CcsSource { family, sets: self.src.sets.clone() } }
    }
}

fn one_step(text: &str) -> PyResult<RuleStep> {
    let text = text.trim();
    let full = if text.starts_with("step ") { text.to_string() } else { format!("step {text}") };
    let mut script = parse_script(&full).map_err(err)?;
    match script.steps.len() {
        1 => Ok(script.steps.remove(0)),
        n => Err(err(format!("expected one step, got {n}"))),
    }
}

#[pymethods]
impl Model {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Model { src: parse_ccs(text).map_err(err)? })
    }

    #[getter]
    fn root(&self) -> String {
        self.src.family.root().to_string()
    }

    /// Canonical text of the family.
    #[getter]
    fn text(&self) -> String {
        print_family(&self.src.family)
    }

    fn constants(&self) -> Vec<String> {
        self.src.family.defs().keys().map(|k| k.to_string()).collect()
    }

    fn with_root(&self, name: &str) -> PyResult<Model> {
        Ok(self.with_family(self.src.family.with_root(name).map_err(err)?))
    }

    #[pyo3(signature = (max_states = DEFAULT_MAX_STATES))]
    fn state_count(&self, max_states: usize) -> PyResult<usize> {
        Ok(self.lts(max_states)?.num_states())
    }

    /// Checks `prop` (a name or an expression over the props in `props`).
    #[pyo3(signature = (props, prop, max_states = DEFAULT_MAX_STATES))]
    fn check(&self, props: &str, prop: &str, max_states: usize) -> PyResult<bool> {
        let phi = parse_mu(props, &self.src.sets).and_then(|m| m.resolve(prop)).map_err(err)?;
        check(&self.lts(max_states)?, &phi).map_err(err)
    }

    /// Rules that match at `path`, as dicts with `rule`, `ready`, `reason`, `step`.
    fn applicable<'py>(&self, py: Python<'py>, path: &str) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let path: Path = path.parse().map_err(err)?;
        let found = list_applicable(&self.src.family, &path).map_err(err)?;
        found
            .iter()
            .map(|a| {
                let d = PyDict::new(py);
                d.set_item("rule", a.rule.to_string())?;
                d.set_item("ready", a.ready)?;
                d.set_item("reason", a.reason.clone())?;
                d.set_item("step", a.step.as_ref().map(|s| s.to_string()))?;
                Ok(d)
            })
            .collect()
    }

    /// Applies one step written as in scripts, e.g. `drop-tau target=A`.
    fn apply(&self, step: &str) -> PyResult<Model> {
        let applied = apply_rule_logged(&self.src.family, &one_step(step)?).map_err(err)?;
        Ok(self.with_family(applied.family))
    }

    /// Runs a script; returns `(model, log)` where each log entry is a dict.
    #[pyo3(signature = (script, certify = false, max_states = DEFAULT_MAX_STATES))]
    fn abstract_with<'py>(
        &self,
        py: Python<'py>,
        script: &str,
        certify: bool,
        max_states: usize,
    ) -> PyResult<(Model, Vec<Bound<'py, PyDict>>)> {
        let script = parse_script(script).map_err(err)?;
        let run = py
            .detach(|| run_script(&self.src.family, &script, &RunOptions { certify, max_states }))
            .map_err(err)?;
        let log = run
            .log
            .iter()
            .map(|r| {
                let d = PyDict::new(py);
                d.set_item("index", r.index)?;
                d.set_item("step", r.step.to_string())?;
                d.set_item("states", r.states)?;
                d.set_item("certification", r.certification.to_string())?;
                d.set_item("chain", r.chain.clone())?;
                d.set_item("note", r.note.clone())?;
                Ok(d)
            })
            .collect::<PyResult<_>>()?;
        Ok((self.with_family(run.family), log))
    }

    fn __str__(&self) -> String {
        self.text()
    }

    fn __repr__(&self) -> String {
        format!("Model(root={:?}, constants={})", self.root(), self.src.family.defs().len())
    }

    fn __eq__(&self, other: &Model) -> bool {
        self.src.family == other.src.family
    }
}

/// Whether `left` is weakly simulated by `right`.
#[pyfunction]
#[pyo3(signature = (left, right, max_states = DEFAULT_MAX_STATES))]
fn simulated_by(py: Python<'_>, left: &Model, right: &Model, max_states: usize) -> PyResult<bool> {
    let (l, r) = (left.lts(max_states)?, right.lts(max_states)?);
    py.detach(|| weakly_simulated_by(&l, &r)).map(|s| s.holds).map_err(err)
}

/// The fragment of `prop`: `muILBox` or `general`.
#[pyfunction]
fn classify(props: &str, prop: &str) -> PyResult<String> {
    let phi = parse_mu(props, &Default::default()).and_then(|m| m.resolve(prop)).map_err(err)?;
    Ok(classify_formula(&phi).map_err(err)?.to_string())
}

#[pyfunction]
fn corpus_ids() -> Vec<&'static str> {
    corpus::ids()
}

/// Replays a corpus entry: `(key, expected, actual, matches)` per manifest line.
#[pyfunction]
#[pyo3(signature = (id, max_states = DEFAULT_MAX_STATES))]
fn corpus_replay(py: Python<'_>, id: &str, max_states: usize) -> PyResult<Vec<(String, String, Option<String>, bool)>> {
    let entry = corpus::load(id).map_err(err)?;
    let replay = py.detach(|| corpus::replay(&entry, max_states));
    Ok(replay.outcomes.iter().map(|o| (o.key.clone(), o.expected.clone(), o.actual.clone(), o.matches())).collect())
}

#[pymodule]
fn ccsabst(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Model>()?;
    m.add_function(wrap_pyfunction!(simulated_by, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_ids, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_replay, m)?)?;
    m.add("CcsabstError", m.py().get_type::<CcsabstError>())?;
    m.add("TruncatedError", m.py().get_type::<TruncatedError>())?;
    m.add("DEFAULT_MAX_STATES", DEFAULT_MAX_STATES)?;
    Ok(())
}
