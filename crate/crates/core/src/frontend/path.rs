//! Subterm addresses: `Const:i.j.k`, child indices from the definition body.
//!
//! Prefix body is child 0; choice branches are numbered in written order;
//! parallel composition has left = 0, right = 1; postfix operators have their
//! operand as child 0. A bare constant name addresses the whole body.

use std::fmt;
use std::str::FromStr;

use crate::action::{label, Label};
use crate::error::AbstractionError;
use crate::process::{Family, Process};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub constant: Label,
    pub steps: Vec<usize>,
}

impl Path {
    pub fn new(constant: &str, steps: Vec<usize>) -> Self {
        Path { constant: label(constant), steps }
    }

    pub fn root_of(constant: &str) -> Self {
        Path::new(constant, vec![])
    }

    pub fn child(&self, i: usize) -> Path {
        let mut steps = self.steps.clone();
        steps.push(i);
        Path { constant: self.constant.clone(), steps }
    }

    pub fn resolve<'f>(&self, family: &'f Family) -> Result<&'f Process, AbstractionError> {
        let mut node = family
            .get(&self.constant)
            .ok_or_else(|| AbstractionError::BadPath(format!("{self}: no constant `{}`", self.constant)))?;
        for (depth, &i) in self.steps.iter().enumerate() {
            node = node.child(i).ok_or_else(|| {
                AbstractionError::BadPath(format!("{self}: no child {i} at depth {depth}"))
            })?;
        }
        Ok(node)
    }

    /// True when no prefix lies strictly above the addressed subterm.
    pub fn is_unguarded(&self, family: &Family) -> Result<bool, AbstractionError> {
        self.resolve(family)?;
        let mut node = family.get(&self.constant).expect("resolved");
        for &i in &self.steps {
            if matches!(node, Process::Prefix(..)) {
                return Ok(false);
            }
            node = node.child(i).expect("resolved");
        }
        Ok(true)
    }

    /// A copy of `family` with the subterm at this path replaced.
    pub fn replace(&self, family: &Family, new: Process) -> Result<Family, AbstractionError> {
        let body = family
            .get(&self.constant)
            .ok_or_else(|| AbstractionError::BadPath(format!("{self}: no constant `{}`", self.constant)))?;
        let rebuilt = replace_in(body, &self.steps, new).ok_or_else(|| AbstractionError::BadPath(self.to_string()))?;
        let mut out = family.clone();
        out.set_def(self.constant.clone(), rebuilt);
        Ok(out)
    }
}

fn replace_in(node: &Process, steps: &[usize], new: Process) -> Option<Process> {
    match steps.split_first() {
        None => Some(new),
        Some((&i, rest)) => {
            let child = node.child(i)?;
            let replaced = replace_in(child, rest, new)?;
            node.with_child(i, replaced)
        }
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.constant)?;
        if !self.steps.is_empty() {
            f.write_str(":")?;
            for (i, s) in self.steps.iter().enumerate() {
                if i > 0 {
                    f.write_str(".")?;
                }
                write!(f, "{s}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Path {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, steps) = match s.split_once(':') {
            Some((n, rest)) => (n, Some(rest)),
            None => (s, None),
        };
        let valid_name = !name.is_empty()
            && name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid_name {
            return Err(format!("malformed path `{s}`: bad constant name"));
        }
        let steps = match steps {
            None => vec![],
            Some(rest) => rest
                .split('.')
                .map(|x| x.parse::<usize>().map_err(|_| format!("malformed path `{s}`: bad step `{x}`")))
                .collect::<Result<Vec<_>, _>>()?,
        };
        Ok(Path::new(name, steps))
    }
}
