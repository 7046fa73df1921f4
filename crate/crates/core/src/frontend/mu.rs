//! Formula files: `prop Name(S1, S2) = body;`.
//!
//! ```text
//! prop NoA = max Z. [[a]]ff & [[-a]]Z;
//! prop Alt(L1, L2) = cycle(L1; L2);
//! prop ME = Alt({enter1,enter2}, {exit1,exit2});
//! ```
//!
//! Inside a modality a name that is a prop parameter or a declared `set`
//! splices in its labels; every other name is an action.

use std::collections::HashMap;

use indexmap::IndexMap;

use super::lexer::{describe, lex, Cursor, Tok, Token};
use crate::action::{label, Action, ActionSet, Label};
use crate::error::ParseError;
use crate::logic::{expand_macro_cycle, Formula, LabelSet, ModLabel, Modality};

const KEYWORDS: &[&str] = &["tt", "ff", "max", "min", "cycle", "prop", "set", "eps", "tau", "not"];

/// A declared property. Parameterless props are parsed eagerly.
#[derive(Clone, Debug)]
pub struct Prop {
    pub name: Label,
    pub params: Vec<Label>,
    body: Vec<Token>,
    formula: Option<Formula>,
}

impl Prop {
    pub fn formula(&self) -> Option<&Formula> {
        self.formula.as_ref()
    }
}

#[derive(Clone, Debug, Default)]
pub struct MuSource {
    pub props: IndexMap<Label, Prop>,
    pub sets: IndexMap<Label, ActionSet>,
}

impl MuSource {
    pub fn get(&self, name: &str) -> Option<&Prop> {
        self.props.get(name)
    }

    /// Parses a formula expression against the declared props and sets, so
    /// both `ME` and `Alt({enter}, {exit})` resolve.
    pub fn resolve(&self, expr: &str) -> Result<Formula, ParseError> {
        let mut p = MuParser::new(lex(expr, true)?, &self.sets, &self.props, HashMap::new());
        let phi = p.formula()?;
        p.end()?;
        closed(phi.alpha_rename(), 1, 1)
    }
}

/// Parses a formula file. `sets` are the named sets of the process file,
/// visible to the formulas alongside any `set` declared here.
pub fn parse_mu(text: &str, sets: &IndexMap<Label, ActionSet>) -> Result<MuSource, ParseError> {
    let mut cur = Cursor::new(lex(text, true)?);
    let mut src = MuSource { props: IndexMap::new(), sets: sets.clone() };
    loop {
        if matches!(cur.peek(), Tok::Eof) {
            return Ok(src);
        }
        if cur.is_keyword("set") {
            cur.bump();
            let here = cur.here().clone();
            let name = cur.expect_ident()?;
            if src.sets.contains_key(name.as_str()) {
                return Err(ParseError::new(here.line, here.column, format!("duplicate set `{name}`")));
            }
            cur.expect_sym("=")?;
            let set = set_literal(&mut cur)?;
            cur.expect_sym(";")?;
            src.sets.insert(label(&name), set);
            continue;
        }
        if !cur.is_keyword("prop") {
            return Err(cur.error(format!("expected `prop` or `set`, found {}", describe(cur.peek()))));
        }
        cur.bump();
        let here = cur.here().clone();
        let name = cur.expect_ident()?;
        if KEYWORDS.contains(&name.as_str()) {
            return Err(ParseError::new(here.line, here.column, format!("`{name}` is reserved")));
        }
        if src.props.contains_key(name.as_str()) {
            return Err(ParseError::new(here.line, here.column, format!("duplicate prop `{name}`")));
        }
        let mut params = Vec::new();
        if cur.eat_sym("(") {
            loop {
                let ph = cur.here().clone();
                let p = cur.expect_ident()?;
                if params.iter().any(|q: &Label| &**q == p) {
                    return Err(ParseError::new(ph.line, ph.column, format!("duplicate parameter `{p}`")));
                }
                params.push(label(&p));
                if cur.eat_sym(")") {
                    break;
                }
                cur.expect_sym(",")?;
            }
        }
        cur.expect_sym("=")?;
        let start = cur.position();
        let mut depth = 0usize;
        while depth > 0 || !cur.is_sym(";") {
            match cur.bump() {
                Tok::Eof => return Err(cur.error("expected `;`")),
                Tok::Sym("(") => depth += 1,
                Tok::Sym(")") => depth = depth.saturating_sub(1),
                _ => {}
            }
        }
        let body = cur.slice(start, cur.position());
        cur.bump();
        // Validate with placeholder arguments so errors surface at definition.
        let placeholder: HashMap<String, LabelSet> =
            params.iter().map(|p| (p.to_string(), LabelSet::names(&[&format!("{p}__")]))).collect();
        let mut p = MuParser::new(body.clone(), &src.sets, &src.props, placeholder);
        let phi = p.formula()?;
        p.end()?;
        let phi = closed(phi.alpha_rename(), here.line, here.column)?;
        let formula = params.is_empty().then_some(phi);
        src.props.insert(label(&name), Prop { name: label(&name), params, body, formula });
    }
}

fn closed(phi: Formula, line: usize, column: usize) -> Result<Formula, ParseError> {
    let free = phi.free_vars();
    if free.is_empty() {
        Ok(phi)
    } else {
        let names: Vec<_> = free.into_iter().collect();
        Err(ParseError::new(line, column, format!("free variables: {}", names.join(", "))))
    }
}

fn set_literal(cur: &mut Cursor) -> Result<ActionSet, ParseError> {
    cur.expect_sym("{")?;
    let mut labels = std::collections::BTreeSet::new();
    if cur.eat_sym("}") {
        return Ok(ActionSet::from_labels(labels));
    }
    loop {
        let here = cur.here().clone();
        match cur.bump() {
            Tok::Ident(s) if s == "tau" => {
                return Err(ParseError::new(here.line, here.column, "tau is not allowed in an action set"))
            }
            Tok::Ident(s) | Tok::CoName(s) => {
                labels.insert(label(&s));
            }
            other => return Err(ParseError::new(here.line, here.column, format!("expected a name, found {}", describe(&other)))),
        }
        if cur.eat_sym("}") {
            return Ok(ActionSet::from_labels(labels));
        }
        cur.expect_sym(",")?;
    }
}

struct MuParser<'a> {
    cur: Cursor,
    sets: &'a IndexMap<Label, ActionSet>,
    props: &'a IndexMap<Label, Prop>,
    params: HashMap<String, LabelSet>,
}

impl<'a> MuParser<'a> {
    fn new(
        toks: Vec<Token>,
        sets: &'a IndexMap<Label, ActionSet>,
        props: &'a IndexMap<Label, Prop>,
        params: HashMap<String, LabelSet>,
    ) -> Self {
        MuParser { cur: Cursor::new(toks), sets, props, params }
    }

    fn end(&self) -> Result<(), ParseError> {
        match self.cur.peek() {
            Tok::Eof => Ok(()),
            other => Err(self.cur.error(format!("unexpected {}", describe(other)))),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        if self.cur.is_keyword("max") || self.cur.is_keyword("min") {
            let greatest = self.cur.is_keyword("max");
            self.cur.bump();
            let here = self.cur.here().clone();
            let z = self.cur.expect_ident()?;
            if KEYWORDS.contains(&z.as_str()) {
                return Err(ParseError::new(here.line, here.column, format!("`{z}` is reserved")));
            }
            self.cur.expect_sym(".")?;
            let body = self.formula()?;
            return Ok(if greatest { Formula::nu(&z, body) } else { Formula::mu(&z, body) });
        }
        let mut l = self.conj()?;
        while self.cur.eat_sym("|") {
            let r = self.conj()?;
            l = Formula::or(l, r);
        }
        Ok(l)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut l = self.unary()?;
        while self.cur.eat_sym("&") {
            let r = self.unary()?;
            l = Formula::and(l, r);
        }
        Ok(l)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.cur.is_sym("!") || self.cur.is_sym("~") || self.cur.is_keyword("not") {
            return Err(self.cur.error("positive normal form only: negation is not supported"));
        }
        if self.cur.is_keyword("max") || self.cur.is_keyword("min") {
            return self.formula();
        }
        let modal = [("[", "]", Modality::Box), ("<", ">", Modality::Diamond), ("[[", "]]", Modality::WeakBox), ("<<", ">>", Modality::WeakDiamond)];
        for (open, close, kind) in modal {
            if self.cur.eat_sym(open) {
                let labels = self.label_list(close, kind.is_weak())?;
                let body = self.unary()?;
                return Ok(Formula::Modal(kind, labels, Box::new(body)));
            }
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let here = self.cur.here().clone();
        match self.cur.bump() {
            Tok::Sym("(") => {
                let f = self.formula()?;
                self.cur.expect_sym(")")?;
                Ok(f)
            }
            Tok::Ident(s) if s == "tt" => Ok(Formula::tt()),
            Tok::Ident(s) if s == "ff" => Ok(Formula::ff()),
            Tok::Ident(s) if s == "cycle" => {
                self.cur.expect_sym("(")?;
                let l1 = self.set_arg()?;
                if !self.cur.eat_sym(";") {
                    self.cur.expect_sym(",")?;
                }
                let l2 = self.set_arg()?;
                self.cur.expect_sym(")")?;
                expand_macro_cycle(&l1, &l2).map_err(|e| ParseError::new(here.line, here.column, e.to_string()))
            }
            Tok::Ident(s) if KEYWORDS.contains(&s.as_str()) => {
                Err(ParseError::new(here.line, here.column, format!("unexpected `{s}`")))
            }
            Tok::Ident(s) => match self.props.get(s.as_str()) {
                Some(prop) => self.call(prop, here),
                None if self.params.contains_key(&s) || self.sets.contains_key(s.as_str()) => Err(ParseError::new(
                    here.line,
                    here.column,
                    format!("`{s}` is a label set, not a formula"),
                )),
                None => Ok(Formula::var(&s)),
            },
            other => Err(ParseError::new(here.line, here.column, format!("expected a formula, found {}", describe(&other)))),
        }
    }

    fn call(&mut self, prop: &Prop, here: Token) -> Result<Formula, ParseError> {
        let mut args = Vec::new();
        if self.cur.eat_sym("(") {
            loop {
                args.push(self.set_arg()?);
                if self.cur.eat_sym(")") {
                    break;
                }
                if !self.cur.eat_sym(";") {
                    self.cur.expect_sym(",")?;
                }
            }
        }
        if args.len() != prop.params.len() {
            return Err(ParseError::new(
                here.line,
                here.column,
                format!("`{}` takes {} set argument(s), given {}", prop.name, prop.params.len(), args.len()),
            ));
        }
        if let Some(f) = &prop.formula {
            return Ok(f.clone());
        }
        let params = prop.params.iter().map(|p| p.to_string()).zip(args).collect();
        let mut inner = MuParser::new(prop.body.clone(), self.sets, self.props, params);
        let phi = inner.formula()?;
        inner.end()?;
        Ok(phi)
    }

    /// A set argument: `{a,'b}`, a parameter, or a declared set.
    fn set_arg(&mut self) -> Result<LabelSet, ParseError> {
        if self.cur.eat_sym("{") {
            return self.label_list("}", true);
        }
        let here = self.cur.here().clone();
        let name = self.cur.expect_ident()?;
        self.named_set(&name)
            .ok_or_else(|| ParseError::new(here.line, here.column, format!("unknown set name `{name}`")))
    }

    fn named_set(&self, name: &str) -> Option<LabelSet> {
        if let Some(s) = self.params.get(name) {
            return Some(s.clone());
        }
        self.sets.get(name).map(|s| LabelSet::positive(s.actions().into_iter().map(ModLabel::Act)))
    }

    /// After the opening bracket, up to and including `close`.
    fn label_list(&mut self, close: &str, weak: bool) -> Result<LabelSet, ParseError> {
        let complement = self.cur.eat_sym("-");
        let mut members = std::collections::BTreeSet::new();
        if !self.cur.eat_sym(close) {
            loop {
                let here = self.cur.here().clone();
                let err = |m: &str| ParseError::new(here.line, here.column, m.to_string());
                match self.cur.bump() {
                    Tok::Ident(s) if s == "eps" => {
                        if !weak {
                            return Err(err("eps is only allowed in weak modalities"));
                        }
                        members.insert(ModLabel::Eps);
                    }
                    Tok::Ident(s) if s == "tau" => {
                        if weak {
                            return Err(err("tau is not allowed in a weak modality"));
                        }
                        members.insert(ModLabel::Act(Action::Tau));
                    }
                    Tok::Ident(s) => match self.named_set(&s) {
                        Some(set) => members.extend(set.members),
                        None => {
                            members.insert(ModLabel::Act(Action::name(&s)));
                        }
                    },
                    Tok::CoName(s) => {
                        members.insert(ModLabel::Act(Action::coname(&s)));
                    }
                    other => return Err(err(&format!("expected a label, found {}", describe(&other)))),
                }
                if self.cur.eat_sym(close) {
                    break;
                }
                self.cur.expect_sym(",")?;
            }
        }
        Ok(LabelSet { complement, members })
    }
}
