//! Canonical printing of process terms and families.

use std::fmt::Write;

use crate::process::{Family, Process};

const SUM: u8 = 0;
const PAR: u8 = 1;
const PRE: u8 = 2;
const POST: u8 = 3;
const ATOM: u8 = 4;

fn level(p: &Process) -> u8 {
    match p {
        Process::Sum(_) => SUM,
        Process::Par(..) => PAR,
        Process::Prefix(..) => PRE,
        Process::Restrict(..) | Process::Relabel(..) | Process::Hide(..) => POST,
        Process::Const(_) | Process::Nil => ATOM,
    }
}

pub fn print_process(p: &Process) -> String {
    let mut s = String::new();
    write_at(&mut s, p, SUM);
    s
}

fn write_at(out: &mut String, p: &Process, ctx: u8) {
    let paren = level(p) < ctx;
    if paren {
        out.push('(');
    }
    match p {
        Process::Nil => out.push('0'),
        Process::Const(n) => out.push_str(n),
        Process::Prefix(a, body) => {
            write!(out, "{a}.").unwrap();
            write_at(out, body, PRE);
        }
        Process::Sum(cs) => {
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" + ");
                }
                write_at(out, c, PAR);
            }
        }
        Process::Par(l, r) => {
            write_at(out, l, PAR);
            out.push_str(" | ");
            write_at(out, r, PRE);
        }
        Process::Restrict(b, set) => {
            write_at(out, b, POST);
            write!(out, "\\{set}").unwrap();
        }
        Process::Hide(b, set) => {
            write_at(out, b, POST);
            write!(out, "\\\\{set}").unwrap();
        }
        Process::Relabel(b, f) => {
            write_at(out, b, POST);
            write!(out, "{f}").unwrap();
        }
    }
    if paren {
        out.push(')');
    }
}

/// One `agent` line per definition in family order, except that the root is
/// printed last so that re-parsing picks it as the root.
pub fn print_family(family: &Family) -> String {
    let mut out = String::new();
    let root = family.root();
    for (name, body) in family.defs().iter().filter(|(n, _)| *n != root) {
        writeln!(out, "agent {name} = {};", print_process(body)).unwrap();
    }
    writeln!(out, "agent {root} = {};", print_process(family.lookup(root).unwrap())).unwrap();
    out
}
