use std::io::{self, Write};

use thiserror::Error;

use super::cnf::{Cnf, Lit};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `p cnf` header")]
    MissingHeader,
    #[error("header declares {declared} clauses, found {found}")]
    ClauseCount { declared: usize, found: usize },
}

pub fn write_dimacs(cnf: &Cnf, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "p cnf {} {}", cnf.num_vars, cnf.clauses.len())?;
    for clause in &cnf.clauses {
        for l in clause {
            write!(out, "{} ", l.to_dimacs())?;
        }
        writeln!(out, "0")?;
    }
    Ok(())
}

/// Sidecar map, one `index name` line per named variable (1-indexed).
pub fn write_varmap(cnf: &Cnf, mut out: impl Write) -> io::Result<()> {
    for (i, n) in cnf.names.iter().enumerate() {
        writeln!(out, "{} {}", i + 1, n)?;
    }
    Ok(())
}

pub fn parse_dimacs(src: &str) -> Result<Cnf, DimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (idx, line) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        let syntax = |message: String| DimacsError::Syntax { line: line_no, message };
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[1] != "cnf" || header.is_some() {
                return Err(syntax(format!("bad header `{line}`")));
            }
            let num = |s: &str| s.parse::<usize>().map_err(|e| syntax(e.to_string()));
            header = Some((num(parts[2])?, num(parts[3])?));
            continue;
        }
        let (vars, _) = header.ok_or(DimacsError::MissingHeader)?;
        for tok in line.split_whitespace() {
            let x: i64 = tok.parse().map_err(|_| syntax(format!("bad literal `{tok}`")))?;
            if x == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if x.unsigned_abs() as usize > vars {
                return Err(syntax(format!("literal {x} exceeds {vars} variables")));
            } else {
                current.push(Lit::from_dimacs(x));
            }
        }
    }
    let (num_vars, declared) = header.ok_or(DimacsError::MissingHeader)?;
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != declared {
        return Err(DimacsError::ClauseCount { declared, found: clauses.len() });
    }
    Ok(Cnf { num_vars, clauses, names: Vec::new() })
}
