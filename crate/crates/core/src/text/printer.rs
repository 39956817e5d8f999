use std::fmt::{self, Write as _};

use crate::chor::ServiceGraph;
use crate::solver::ConstraintSet;
use crate::term::{Collection, Term};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Symbol(s) => f.write_str(s),
            Term::DownVar(v) => write!(f, "${v}"),
            Term::UpVar(v) => write!(f, "^{v}"),
            Term::Tuple(items) => {
                f.write_str("(")?;
                for (i, t) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")
            }
            Term::Record(c) => collection(f, c, "{", "}", "$"),
            Term::Choice(c) => collection(f, c, "(:", ":)", "^"),
            Term::Switch(alts) => {
                f.write_str("< ")?;
                for (i, a) in alts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}: {}", a.guard, a.term)?;
                }
                f.write_str(" >")
            }
        }
    }
}

fn collection(f: &mut fmt::Formatter<'_>, c: &Collection, open: &str, close: &str, sigil: &str) -> fmt::Result {
    if c.elements.is_empty() && c.tail.is_none() {
        // `{}` and `(: :)`
        return if open == "{" { f.write_str("{}") } else { f.write_str("(: :)") };
    }
    f.write_str(open)?;
    f.write_str(" ")?;
    for (i, e) in c.elements.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        f.write_str(&e.label)?;
        if !e.guard.is_true() {
            write!(f, "({})", e.guard)?;
        }
        write!(f, ": {}", e.term)?;
    }
    if let Some(t) = &c.tail {
        if !c.elements.is_empty() {
            f.write_str(" ")?;
        }
        write!(f, "| {sigil}{t}")?;
    }
    f.write_str(" ")?;
    f.write_str(close)
}

pub fn print_term(t: &Term) -> String {
    t.to_string()
}

/// One `lhs <= rhs;` line per constraint.
pub fn print_constraints(cs: &ConstraintSet) -> String {
    let mut out = String::new();
    for c in cs.iter() {
        let _ = writeln!(out, "{} <= {};", c.lhs, c.rhs);
    }
    out
}

pub fn print_chor(g: &ServiceGraph) -> String {
    let mut out = String::new();
    for (i, s) in g.services.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "service {} {{", s.name);
        for p in &s.ports {
            let _ = writeln!(out, "  {} {}: {};", p.direction, p.name, p.term);
        }
        out.push_str("}\n");
    }
    if !g.channels.is_empty() {
        out.push('\n');
    }
    for c in &g.channels {
        let _ = writeln!(out, "channel {};", c);
    }
    out
}
