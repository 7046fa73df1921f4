//! Checked-in models with their formulas, abstraction scripts and expected
//! results.
//!
//! An entry is a directory `<id>/` holding `model.ccs`, `props.mu`, any
//! number of `<name>.abst` scripts and a `manifest` of `key = value [tag]`
//! lines. Recognised keys:
//!
//! ```text
//! states = 16                    # LTS of the root
//! transitions = 40
//! minimized = 12                 # strong bisimulation quotient
//! check.ME = true                # prop at the root
//! check.Live@Dekker = true       # prop at another root
//! fragment.ME = muILBox
//! sim.A.B = false                # A weakly simulated by B
//! script.safety.steps = 21
//! script.safety.states = 16      # final family
//! script.safety.certified = 21   # steps passing certification
//! script.safety.check.Cycle = true
//! reference.states = 153         # recorded, never compared
//! ```
//!
//! Tags say where an expected value comes from: `published` (a figure from
//! the literature), `derived` (computed independently, by hand or another
//! tool) or `trivial`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path as FsPath;

use indexmap::IndexMap;
use thiserror::Error;

use crate::abstraction::{run_script, RunOptions, Script, ScriptRun};
use crate::error::{CcsError, ParseError};
use crate::frontend::{parse_ccs, parse_mu, parse_script, CcsSource, MuSource};
use crate::logic::{check, classify};
use crate::lts::{build_lts, Lts};
use crate::process::Family;
use crate::simulation::{minimized_state_count, weakly_simulated_by};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("unknown corpus entry `{0}`")]
    UnknownEntry(String),
    #[error("{file}: {source}")]
    Parse { file: String, source: ParseError },
    #[error("{file}: {source}")]
    Io { file: String, source: std::io::Error },
    #[error(transparent)]
    Ccs(#[from] CcsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tag {
    Published,
    Derived,
    Trivial,
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tag::Published => "published",
            Tag::Derived => "derived",
            Tag::Trivial => "trivial",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestEntry {
    pub key: String,
    pub value: String,
    pub tag: Tag,
    pub line: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn get(&self, key: &str) -> Option<&ManifestEntry> {
        self.entries.iter().find(|e| e.key == key)
    }
}

/// Every line must carry a tag; `#` starts a comment.
pub fn parse_manifest(text: &str) -> Result<Manifest, ParseError> {
    let mut entries: Vec<ManifestEntry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, rest) = body
            .split_once('=')
            .ok_or_else(|| ParseError::new(line, 1, "expected `key = value [tag]`"))?;
        let key = key.trim();
        let rest = rest.trim();
        let open = rest.rfind('[').filter(|_| rest.ends_with(']'));
        let Some(open) = open else {
            return Err(ParseError::new(line, body.len(), format!("`{key}` has no provenance tag")));
        };
        let tag = match &rest[open + 1..rest.len() - 1] {
            "published" => Tag::Published,
            "derived" => Tag::Derived,
            "trivial" => Tag::Trivial,
            other => return Err(ParseError::new(line, open + 1, format!("unknown tag `{other}`"))),
        };
        let value = rest[..open].trim();
        if key.is_empty() || value.is_empty() {
            return Err(ParseError::new(line, 1, "empty key or value"));
        }
        if entries.iter().any(|e| e.key == key) {
            return Err(ParseError::new(line, 1, format!("duplicate key `{key}`")));
        }
        entries.push(ManifestEntry { key: key.to_string(), value: value.to_string(), tag, line });
    }
    Ok(Manifest { entries })
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub id: String,
    pub model: CcsSource,
    pub props: MuSource,
    /// Scripts by file stem, in name order.
    pub scripts: IndexMap<String, Script>,
    pub manifest: Manifest,
    /// The unparsed files, by name.
    pub files: BTreeMap<String, String>,
}

struct Embedded {
    id: &'static str,
    files: &'static [(&'static str, &'static str)],
}

macro_rules! entry {
    ($id:literal, [$($file:literal),* $(,)?]) => {
        Embedded {
            id: $id,
            files: &[$(($file, include_str!(concat!("../../../corpus/", $id, "/", $file)))),*],
        }
    };
}

const EMBEDDED: &[Embedded] = &[
    entry!("ab-choice", ["model.ccs", "props.mu", "manifest"]),
    entry!("alternator", ["model.ccs", "props.mu", "manifest"]),
    entry!("dekker", ["model.ccs", "props.mu", "manifest"]),
    entry!("dekker-live", ["model.ccs", "props.mu", "dekker-live.abst", "manifest"]),
    entry!("dekker1", ["model.ccs", "props.mu", "dekker-safety.abst", "manifest"]),
];

pub fn ids() -> Vec<&'static str> {
    EMBEDDED.iter().map(|e| e.id).collect()
}

/// Loads one of the entries compiled into the library.
pub fn load(id: &str) -> Result<CorpusEntry, CorpusError> {
    let e = EMBEDDED.iter().find(|e| e.id == id).ok_or_else(|| CorpusError::UnknownEntry(id.to_string()))?;
    let files = e.files.iter().map(|(n, t)| (n.to_string(), t.to_string())).collect();
    from_files(id, files)
}

/// Loads an entry from a directory on disk.
pub fn load_dir(dir: &FsPath) -> Result<CorpusEntry, CorpusError> {
    let io = |file: &FsPath, source| CorpusError::Io { file: file.display().to_string(), source };
    let id = dir.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut files = BTreeMap::new();
    for item in std::fs::read_dir(dir).map_err(|e| io(dir, e))? {
        let path = item.map_err(|e| io(dir, e))?.path();
        let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        if name == "model.ccs" || name == "props.mu" || name == "manifest" || name.ends_with(".abst") {
            files.insert(name, std::fs::read_to_string(&path).map_err(|e| io(&path, e))?);
        }
    }
    from_files(&id, files)
}

fn from_files(id: &str, files: BTreeMap<String, String>) -> Result<CorpusEntry, CorpusError> {
    let parse_err = |file: &str| {
        let file = format!("{id}/{file}");
        move |source| CorpusError::Parse { file, source }
    };
    let text = |name: &str| files.get(name).map(String::as_str).unwrap_or("");
    let model = parse_ccs(text("model.ccs")).map_err(parse_err("model.ccs"))?;
    let props = parse_mu(text("props.mu"), &model.sets).map_err(parse_err("props.mu"))?;
    let manifest = parse_manifest(text("manifest")).map_err(parse_err("manifest"))?;
    let mut scripts = IndexMap::new();
    for (name, body) in files.iter().filter(|(n, _)| n.ends_with(".abst")) {
        let script = parse_script(body).map_err(parse_err(name))?;
        scripts.insert(name.trim_end_matches(".abst").to_string(), script);
    }
    Ok(CorpusEntry { id: id.to_string(), model, props, scripts, manifest, files })
}

/// One manifest line after replay. `actual` is `None` for reference keys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub key: String,
    pub expected: String,
    pub actual: Option<String>,
    pub tag: Tag,
}

impl Outcome {
    pub fn matches(&self) -> bool {
        self.actual.as_ref().is_none_or(|a| *a == self.expected)
    }
}

#[derive(Clone, Debug)]
pub struct Replay {
    pub outcomes: Vec<Outcome>,
    pub runs: IndexMap<String, ScriptRun>,
}

impl Replay {
    pub fn matches(&self) -> bool {
        self.outcomes.iter().all(Outcome::matches)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &Outcome> {
        self.outcomes.iter().filter(|o| !o.matches())
    }
}

/// Recomputes every manifest value. Scripts run with certification on.
pub fn replay(entry: &CorpusEntry, max_states: usize) -> Replay {
    let mut ctx = Ctx { entry, max_states, ltss: BTreeMap::new(), runs: IndexMap::new() };
    let outcomes = entry
        .manifest
        .entries
        .iter()
        .map(|e| Outcome {
            key: e.key.clone(),
            expected: e.value.clone(),
            actual: if e.key.starts_with("reference.") { None } else { Some(ctx.eval(&e.key)) },
            tag: e.tag,
        })
        .collect();
    Replay { outcomes, runs: ctx.runs }
}

struct Ctx<'a> {
    entry: &'a CorpusEntry,
    max_states: usize,
    ltss: BTreeMap<String, Result<Lts, String>>,
    runs: IndexMap<String, ScriptRun>,
}

impl Ctx<'_> {
    fn family(&self, root: Option<&str>) -> Result<Family, String> {
        let f = &self.entry.model.family;
        match root {
            Some(r) => f.with_root(r).map_err(|e| e.to_string()),
            None => Ok(f.clone()),
        }
    }

    fn lts_of(&mut self, key: &str, family: Result<Family, String>) -> Result<&Lts, String> {
        if !self.ltss.contains_key(key) {
            let built = family.and_then(|f| build_lts(&f, self.max_states).map_err(|e| e.to_string())).and_then(|l| {
                if l.is_truncated() {
                    Err(format!("truncated at {} states", self.max_states))
                } else {
                    Ok(l)
                }
            });
            self.ltss.insert(key.to_string(), built);
        }
        self.ltss[key].as_ref().map_err(Clone::clone)
    }

    fn run(&mut self, name: &str) -> Result<&ScriptRun, String> {
        if !self.runs.contains_key(name) {
            let script = self.entry.scripts.get(name).ok_or_else(|| format!("no script `{name}`"))?;
            let opts = RunOptions { certify: true, max_states: self.max_states };
            let run = run_script(&self.entry.model.family, script, &opts).map_err(|e| e.to_string())?;
            self.runs.insert(name.to_string(), run);
        }
        Ok(&self.runs[name])
    }

    fn check_prop(&mut self, lts_key: &str, family: Result<Family, String>, prop: &str) -> Result<String, String> {
        let phi = self.entry.props.resolve(prop).map_err(|e| e.to_string())?;
        let lts = self.lts_of(lts_key, family)?;
        check(lts, &phi).map(|b| b.to_string()).map_err(|e| e.to_string())
    }

    fn eval(&mut self, key: &str) -> String {
        self.try_eval(key).unwrap_or_else(|e| format!("error: {e}"))
    }

    fn try_eval(&mut self, key: &str) -> Result<String, String> {
        let parts: Vec<&str> = key.split('.').collect();
        match parts.as_slice() {
            ["states"] => Ok(self.lts_of("", self.family(None))?.num_states().to_string()),
            ["transitions"] => Ok(self.lts_of("", self.family(None))?.num_transitions().to_string()),
            ["minimized"] => Ok(minimized_state_count(self.lts_of("", self.family(None))?).to_string()),
            ["check", prop] => match prop.split_once('@') {
                Some((p, root)) => self.check_prop(root, self.family(Some(root)), p),
                None => self.check_prop("", self.family(None), prop),
            },
            ["fragment", prop] => {
                let phi = self.entry.props.resolve(prop).map_err(|e| e.to_string())?;
                classify(&phi).map(|f| f.to_string()).map_err(|e| e.to_string())
            }
            ["sim", left, right] => {
                let (lk, rk) = (left.to_string(), right.to_string());
                let l = self.lts_of(&lk, self.family(Some(left)))?.clone();
                let r = self.lts_of(&rk, self.family(Some(right)))?;
                weakly_simulated_by(&l, r).map(|s| s.holds.to_string()).map_err(|e| e.to_string())
            }
            ["script", name, rest @ ..] => {
                let run = self.run(name)?;
                let family = run.family.clone();
                let lts_key = format!("script:{name}");
                match rest {
                    ["steps"] => Ok(run.log.len().to_string()),
                    ["states"] => Ok(self.lts_of(&lts_key, Ok(family))?.num_states().to_string()),
                    ["certified"] => Ok(run
                        .log
                        .iter()
                        .filter(|s| s.certification == crate::abstraction::Certification::Certified)
                        .count()
                        .to_string()),
                    ["check", prop] => self.check_prop(&lts_key, Ok(family), prop),
                    _ => Err(format!("unknown key `{key}`")),
                }
            }
            _ => Err(format!("unknown key `{key}`")),
        }
    }
}
