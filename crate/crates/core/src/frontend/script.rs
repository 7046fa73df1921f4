//! Abstraction scripts, one step per line:
//!
//! ```text
//! # hide the turn variable
//! step par-hide target=Dekker K={kr1,kr2,kw1,kw2}
//! step push-hide
//! step merge a=P1 b=P12
//! step rest-relabel target=A f=[enter/enter1]
//! ```
//!
//! Values are action sets `{..}`, relabellings `[new/old,..]` or names.

use crate::abstraction::{ParamValue, RuleId, RuleStep, Script};
use crate::action::label;
use crate::error::ParseError;

use super::ccs::{parse_action_set, parse_relabelling};
use super::path::Path;

pub fn parse_script(text: &str) -> Result<Script, ParseError> {
    let mut steps = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("");
        let words = split_words(line).map_err(|(col, msg)| ParseError::new(line_no, col, msg))?;
        let Some(((col, first), rest)) = words.split_first() else {
            continue;
        };
        if *first != "step" {
            return Err(ParseError::new(line_no, *col, format!("expected `step`, found `{first}`")));
        }
        let Some(((rcol, rule), rest)) = rest.split_first() else {
            return Err(ParseError::new(line_no, col + first.len(), "missing rule id"));
        };
        let rule: RuleId = rule.parse().map_err(|e: String| ParseError::new(line_no, *rcol, e))?;
        let mut target = None;
        let mut params = Vec::new();
        for (wcol, word) in rest {
            let Some((key, value)) = word.split_once('=') else {
                return Err(ParseError::new(line_no, *wcol, format!("expected `key=value`, found `{word}`")));
            };
            let vcol = wcol + key.len() + 1;
            if key == "target" {
                if target.is_some() {
                    return Err(ParseError::new(line_no, *wcol, "duplicate target"));
                }
                target = Some(value.parse::<Path>().map_err(|e| ParseError::new(line_no, vcol, e))?);
                continue;
            }
            if params.iter().any(|(k, _)| k == key) {
                return Err(ParseError::new(line_no, *wcol, format!("duplicate parameter `{key}`")));
            }
            let shift = |e: ParseError| ParseError::new(line_no, vcol + e.column - 1, e.message);
            let v = if value.starts_with('{') {
                ParamValue::Set(parse_action_set(value).map_err(shift)?)
            } else if value.starts_with('[') {
                ParamValue::Relabelling(parse_relabelling(value).map_err(shift)?)
            } else if is_name(value) {
                ParamValue::Name(label(value))
            } else {
                return Err(ParseError::new(line_no, vcol, format!("bad value `{value}`")));
            };
            params.push((key.to_string(), v));
        }
        let step = RuleStep::new(rule, target, params).map_err(|e| ParseError::new(line_no, *col, e.to_string()))?;
        steps.push(step);
    }
    Ok(Script { steps })
}

pub fn print_script(script: &Script) -> String {
    script.to_string()
}

fn is_name(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Whitespace-separated words with 1-based columns; whitespace inside
/// `{..}` or `[..]` does not split.
fn split_words(line: &str) -> Result<Vec<(usize, &str)>, (usize, String)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start: Option<usize> = None;
    let col_of = |byte: usize| line[..byte].chars().count() + 1;
    for (b, c) in line.char_indices() {
        match c {
            '{' | '[' => depth += 1,
            '}' | ']' => {
                depth -= 1;
                if depth < 0 {
                    return Err((col_of(b), format!("unbalanced `{c}`")));
                }
            }
            _ => {}
        }
        if c.is_whitespace() && depth == 0 {
            if let Some(s) = start.take() {
                out.push((col_of(s), &line[s..b]));
            }
        } else if start.is_none() {
            start = Some(b);
        }
    }
    if depth != 0 {
        return Err((col_of(line.len()), "unclosed bracket".into()));
    }
    if let Some(s) = start {
        out.push((col_of(s), &line[s..]));
    }
    Ok(out)
}
