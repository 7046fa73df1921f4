//! Parser for process files.
//!
//! ```text
//! set Vars = {x, y};
//! agent A = a.'b.A + tau.(A | B)\Vars;
//! agent B = (c.0)[d/c]\\{d};
//! ```
//!
//! Postfix operators (`\L`, `\\L`, `[new/old]`) bind tightest, then prefix,
//! then `|`, then `+`. The last agent defined is the root.

use std::collections::BTreeMap;

use indexmap::IndexMap;

use super::lexer::{describe, lex, Cursor, Tok};
use crate::action::{label, Action, ActionSet, Label, Relabelling};
use crate::error::{CcsError, ParseError};
use crate::process::{Family, Process};

/// A parsed process file: the family plus the named sets it declared.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CcsSource {
    pub family: Family,
    pub sets: IndexMap<Label, ActionSet>,
}

pub fn parse_ccs(text: &str) -> Result<CcsSource, ParseError> {
    let mut p = CcsParser { cur: Cursor::new(lex(text, false)?), sets: IndexMap::new(), refs: Vec::new() };
    let mut defs: IndexMap<Label, Process> = IndexMap::new();
    let mut positions = Vec::new();
    let mut last = None;
    loop {
        if matches!(p.cur.peek(), Tok::Eof) {
            break;
        }
        if p.cur.is_keyword("set") {
            p.cur.bump();
            let here = p.cur.here().clone();
            let name = p.cur.expect_ident()?;
            if p.sets.contains_key(name.as_str()) {
                return Err(ParseError::new(here.line, here.column, format!("duplicate set `{name}`")));
            }
            p.cur.expect_sym("=")?;
            let set = p.set_literal()?;
            p.cur.expect_sym(";")?;
            p.sets.insert(label(&name), set);
        } else if p.cur.is_keyword("agent") {
            p.cur.bump();
            let here = p.cur.here().clone();
            let name = p.cur.expect_ident()?;
            if is_reserved(&name) {
                return Err(ParseError::new(here.line, here.column, format!("`{name}` is reserved")));
            }
            if defs.contains_key(name.as_str()) {
                return Err(ParseError::new(here.line, here.column, format!("duplicate agent `{name}`")));
            }
            p.cur.expect_sym("=")?;
            let body = p.sum()?;
            p.cur.expect_sym(";")?;
            last = Some(name.clone());
            positions.push((here.line, here.column));
            defs.insert(label(&name), body);
        } else {
            return Err(p.cur.error(format!("expected `agent` or `set`, found {}", describe(p.cur.peek()))));
        }
    }
    let root = last.ok_or_else(|| p.cur.error("no agent definitions"))?;
    for (name, line, column) in &p.refs {
        if !defs.contains_key(name.as_str()) {
            return Err(ParseError::new(*line, *column, format!("undefined constant `{name}`")));
        }
    }
    let family = Family::new(defs, &root).map_err(|e| ParseError::new(1, 1, e.to_string()))?;
    if let Some(bad) = family.static_unguarded_cycle() {
        let (line, column) = positions[family.defs().get_index_of(&bad).unwrap_or(0)];
        return Err(ParseError::new(line, column, CcsError::UnguardedRecursion(bad.to_string()).to_string()));
    }
    Ok(CcsSource { family, sets: p.sets })
}

/// Parses a single process expression (constants are not checked).
pub fn parse_process(text: &str) -> Result<Process, ParseError> {
    let mut p = CcsParser { cur: Cursor::new(lex(text, false)?), sets: IndexMap::new(), refs: Vec::new() };
    let e = p.sum()?;
    if !matches!(p.cur.peek(), Tok::Eof) {
        return Err(p.cur.error(format!("unexpected {}", describe(p.cur.peek()))));
    }
    Ok(e)
}

/// Parses `{a,b}` (a closed action set).
pub fn parse_action_set(text: &str) -> Result<ActionSet, ParseError> {
    let mut p = CcsParser { cur: Cursor::new(lex(text, false)?), sets: IndexMap::new(), refs: Vec::new() };
    let s = p.set_literal()?;
    if !matches!(p.cur.peek(), Tok::Eof) {
        return Err(p.cur.error(format!("unexpected {}", describe(p.cur.peek()))));
    }
    Ok(s)
}

/// Parses `[new/old,...]`.
pub fn parse_relabelling(text: &str) -> Result<Relabelling, ParseError> {
    let mut p = CcsParser { cur: Cursor::new(lex(text, false)?), sets: IndexMap::new(), refs: Vec::new() };
    p.cur.expect_sym("[")?;
    let f = p.relabelling_body()?;
    if !matches!(p.cur.peek(), Tok::Eof) {
        return Err(p.cur.error(format!("unexpected {}", describe(p.cur.peek()))));
    }
    Ok(f)
}

fn is_reserved(s: &str) -> bool {
    matches!(s, "tau" | "agent" | "set")
}

struct CcsParser {
    cur: Cursor,
    sets: IndexMap<Label, ActionSet>,
    refs: Vec<(String, usize, usize)>,
}

impl CcsParser {
    fn sum(&mut self) -> Result<Process, ParseError> {
        let mut parts = vec![self.par()?];
        while self.cur.eat_sym("+") {
            parts.push(self.par()?);
        }
        Ok(Process::sum(parts))
    }

    fn par(&mut self) -> Result<Process, ParseError> {
        let mut left = self.prefixed()?;
        while self.cur.eat_sym("|") {
            let right = self.prefixed()?;
            left = Process::par(left, right);
        }
        Ok(left)
    }

    fn prefixed(&mut self) -> Result<Process, ParseError> {
        let action = match (self.cur.peek().clone(), self.cur.peek_at(1)) {
            (Tok::Ident(s), Tok::Sym(".")) => Some(if s == "tau" { Action::Tau } else { Action::Name(label(&s)) }),
            (Tok::CoName(s), _) => Some(Action::CoName(label(&s))),
            _ => None,
        };
        match action {
            Some(a) => {
                self.cur.bump();
                self.cur.expect_sym(".")?;
                let body = self.prefixed()?;
                Ok(Process::prefix(a, body))
            }
            None => self.postfixed(),
        }
    }

    fn postfixed(&mut self) -> Result<Process, ParseError> {
        let mut e = self.atom()?;
        loop {
            if self.cur.eat_sym("\\\\") {
                let set = self.set_operand()?;
                e = Process::hide(e, set);
            } else if self.cur.eat_sym("\\") {
                let set = self.set_operand()?;
                e = Process::restrict(e, set);
            } else if self.cur.eat_sym("[") {
                let f = self.relabelling_body()?;
                e = Process::relabel(e, f);
            } else {
                return Ok(e);
            }
        }
    }

    fn atom(&mut self) -> Result<Process, ParseError> {
        let here = self.cur.here().clone();
        match self.cur.bump() {
            Tok::Zero => Ok(Process::Nil),
            Tok::Ident(s) if s == "tau" => Err(ParseError::new(here.line, here.column, "`tau` must prefix a process")),
            Tok::Ident(s) if is_reserved(&s) => {
                Err(ParseError::new(here.line, here.column, format!("unexpected keyword `{s}`")))
            }
            Tok::Ident(s) => {
                self.refs.push((s.clone(), here.line, here.column));
                Ok(Process::Const(label(&s)))
            }
            Tok::Sym("(") => {
                let e = self.sum()?;
                self.cur.expect_sym(")")?;
                Ok(e)
            }
            other => Err(ParseError::new(here.line, here.column, format!("expected a process, found {}", describe(&other)))),
        }
    }

    fn set_operand(&mut self) -> Result<ActionSet, ParseError> {
        if self.cur.is_sym("{") {
            return self.set_literal();
        }
        let here = self.cur.here().clone();
        let name = self.cur.expect_ident()?;
        self.sets
            .get(name.as_str())
            .cloned()
            .ok_or_else(|| ParseError::new(here.line, here.column, format!("unknown set name `{name}`")))
    }

    fn set_literal(&mut self) -> Result<ActionSet, ParseError> {
        self.cur.expect_sym("{")?;
        let mut labels = std::collections::BTreeSet::new();
        if self.cur.eat_sym("}") {
            return Ok(ActionSet::from_labels(labels));
        }
        loop {
            let here = self.cur.here().clone();
            match self.cur.bump() {
                Tok::Ident(s) if s == "tau" => {
                    return Err(ParseError::new(here.line, here.column, "tau is not allowed in an action set"))
                }
                Tok::Ident(s) | Tok::CoName(s) => {
                    labels.insert(label(&s));
                }
                other => {
                    return Err(ParseError::new(here.line, here.column, format!("expected a name, found {}", describe(&other))))
                }
            }
            if self.cur.eat_sym("}") {
                return Ok(ActionSet::from_labels(labels));
            }
            self.cur.expect_sym(",")?;
        }
    }

    /// After the opening `[`.
    fn relabelling_body(&mut self) -> Result<Relabelling, ParseError> {
        let mut map = BTreeMap::new();
        loop {
            let new = self.relabel_name()?;
            self.cur.expect_sym("/")?;
            let here = self.cur.here().clone();
            let old = self.relabel_name()?;
            if map.insert(label(&old), label(&new)).is_some() {
                return Err(ParseError::new(here.line, here.column, format!("`{old}` relabelled twice")));
            }
            if self.cur.eat_sym("]") {
                return Ok(Relabelling::from_map(map));
            }
            self.cur.expect_sym(",")?;
        }
    }

    fn relabel_name(&mut self) -> Result<String, ParseError> {
        let here = self.cur.here().clone();
        match self.cur.bump() {
            Tok::Ident(s) if s == "tau" => Err(ParseError::new(here.line, here.column, "tau cannot be relabelled")),
            Tok::Ident(s) => Ok(s),
            other => Err(ParseError::new(here.line, here.column, format!("expected a name, found {}", describe(&other)))),
        }
    }
}
