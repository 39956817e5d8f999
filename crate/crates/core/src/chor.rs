//! Service graphs: services with typed input and output ports, connected by
//! channels. Each channel requires the output term to be junior to the input
//! term it feeds.

use std::fmt::{self, Write as _};

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::solver::{self, ConstraintSet, Origin, SeniorityConstraint, SolveError, SolveOptions, Verdict};
use crate::term::{Guard, Term};
use crate::text::{print_term, SourceSpan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    In,
    Out,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::In => "in",
            Direction::Out => "out",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Port {
    pub name: String,
    pub direction: Direction,
    pub term: Term,
    pub span: Option<SourceSpan>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Service {
    pub name: String,
    pub ports: Vec<Port>,
    pub span: Option<SourceSpan>,
}

impl Service {
    pub fn port(&self, name: &str) -> Option<&Port> {
        self.ports.iter().find(|p| p.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Endpoint {
    pub service: String,
    pub port: String,
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.service, self.port)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Channel {
    pub from: Endpoint,
    pub to: Endpoint,
    pub span: Option<SourceSpan>,
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.from, self.to)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ServiceGraph {
    pub file: Option<String>,
    pub services: Vec<Service>,
    pub channels: Vec<Channel>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("channel `{channel}`: no port `{missing}`")]
    DanglingChannel { channel: String, missing: String },
    #[error("channel `{channel}`: `{endpoint}` is not an {expected} port")]
    RoleMismatch { channel: String, endpoint: String, expected: Direction },
    #[error("service `{0}` declared twice")]
    DuplicateService(String),
    #[error("service `{service}` declares port `{port}` twice")]
    DuplicatePort { service: String, port: String },
    #[error(transparent)]
    Solve(#[from] SolveError),
}

impl ServiceGraph {
    pub fn service(&self, name: &str) -> Option<&Service> {
        self.services.iter().find(|s| s.name == name)
    }

    fn endpoint(&self, e: &Endpoint) -> Option<&Port> {
        self.service(&e.service)?.port(&e.port)
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        let mut names = std::collections::HashSet::new();
        for s in &self.services {
            if !names.insert(&s.name) {
                return Err(GraphError::DuplicateService(s.name.clone()));
            }
            let mut ports = std::collections::HashSet::new();
            for p in &s.ports {
                if !ports.insert(&p.name) {
                    return Err(GraphError::DuplicatePort { service: s.name.clone(), port: p.name.clone() });
                }
            }
        }
        for c in &self.channels {
            for (end, expected) in [(&c.from, Direction::Out), (&c.to, Direction::In)] {
                let port = self.endpoint(end).ok_or_else(|| GraphError::DanglingChannel {
                    channel: c.to_string(),
                    missing: end.to_string(),
                })?;
                if port.direction != expected {
                    return Err(GraphError::RoleMismatch {
                        channel: c.to_string(),
                        endpoint: end.to_string(),
                        expected,
                    });
                }
            }
        }
        Ok(())
    }

    /// One `out <= in` constraint per channel, in declaration order.
    pub fn derive_constraints(&self) -> Result<ConstraintSet, GraphError> {
        self.validate()?;
        Ok(self
            .channels
            .iter()
            .map(|c| {
                let out = self.endpoint(&c.from).expect("validated");
                let inp = self.endpoint(&c.to).expect("validated");
                SeniorityConstraint::new(out.term.clone(), inp.term.clone()).with_origin(Origin {
                    label: Some(c.to_string()),
                    file: self.file.clone(),
                    span: c.span,
                })
            })
            .collect())
    }

    /// Solves the graph and reports the configured interfaces.
    pub fn configure(&self, opts: &SolveOptions) -> Result<ConfigurationReport, GraphError> {
        let cs = self.derive_constraints()?;
        let report = solver::solve(&cs, opts)?;
        let iterations = report.stats.iterations;
        let solution = match &report.verdict {
            Verdict::Unsat(info) => {
                return Ok(ConfigurationReport {
                    verdict: "unsat".into(),
                    iterations,
                    unsat_channels: info.culprits.iter().map(|&i| self.channels[i].to_string()).collect(),
                    ..ConfigurationReport::default()
                })
            }
            Verdict::Sat(s) => s,
        };
        let mut services = Vec::with_capacity(self.services.len());
        for s in &self.services {
            let mut ports = Vec::with_capacity(s.ports.len());
            for p in &s.ports {
                let solved = solution.apply(&p.term).map_err(SolveError::from)?;
                let mut dropped = Vec::new();
                dropped_elements(&p.term, &solution.bvals, "", &mut dropped);
                let mut tails = IndexMap::new();
                tail_expansions(&p.term, solution, &mut tails);
                ports.push(PortReport {
                    name: p.name.clone(),
                    direction: p.direction,
                    original: print_term(&p.term),
                    solved: print_term(&solved),
                    dropped,
                    tail_expansions: tails,
                    solved_term: solved,
                });
            }
            services.push(ServiceReport { name: s.name.clone(), ports });
        }
        let mut tvars = IndexMap::new();
        for (k, t) in &solution.down {
            tvars.insert(format!("${k}"), print_term(t));
        }
        for (k, t) in &solution.up {
            tvars.insert(format!("^{k}"), print_term(t));
        }
        Ok(ConfigurationReport {
            verdict: "sat".into(),
            bvars: solution.bvals.iter().map(|(k, v)| (k.clone(), *v)).collect(),
            tvars,
            services,
            iterations,
            unsat_channels: Vec::new(),
        })
    }
}

/// Paths of elements whose guard is false under `bvals`; the contents of a
/// dropped element are not listed separately.
fn dropped_elements(t: &Term, bvals: &crate::term::BoolAssignment, path: &str, out: &mut Vec<String>) {
    let join = |step: &str| if path.is_empty() { step.to_string() } else { format!("{path}.{step}") };
    match t {
        Term::Tuple(items) => {
            for (i, item) in items.iter().enumerate() {
                dropped_elements(item, bvals, &join(&format!("#{i}")), out);
            }
        }
        Term::Record(c) | Term::Choice(c) => {
            for e in &c.elements {
                if matches!(e.guard.assign(bvals), Guard::Const(false)) {
                    out.push(join(&e.label));
                } else {
                    dropped_elements(&e.term, bvals, &join(&e.label), out);
                }
            }
        }
        Term::Switch(alts) => {
            for a in alts {
                if !matches!(a.guard.assign(bvals), Guard::Const(false)) {
                    dropped_elements(&a.term, bvals, path, out);
                }
            }
        }
        _ => {}
    }
}

fn tail_expansions(t: &Term, solution: &solver::Solution, out: &mut IndexMap<String, String>) {
    match t {
        Term::Tuple(items) => items.iter().for_each(|i| tail_expansions(i, solution, out)),
        Term::Record(c) | Term::Choice(c) => {
            for e in &c.elements {
                tail_expansions(&e.term, solution, out);
            }
            if let Some(tail) = &c.tail {
                let (key, value) = if matches!(t, Term::Record(_)) {
                    (format!("${tail}"), solution.down.get(tail))
                } else {
                    (format!("^{tail}"), solution.up.get(tail))
                };
                if let Some(v) = value {
                    out.insert(key, print_term(v));
                }
            }
        }
        Term::Switch(alts) => alts.iter().for_each(|a| tail_expansions(&a.term, solution, out)),
        _ => {}
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PortReport {
    pub name: String,
    pub direction: Direction,
    pub original: String,
    pub solved: String,
    pub dropped: Vec<String>,
    pub tail_expansions: IndexMap<String, String>,
    #[serde(skip)]
    pub solved_term: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ServiceReport {
    pub name: String,
    pub ports: Vec<PortReport>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ConfigurationReport {
    pub verdict: String,
    pub bvars: IndexMap<String, bool>,
    pub tvars: IndexMap<String, String>,
    pub services: Vec<ServiceReport>,
    pub iterations: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub unsat_channels: Vec<String>,
}

impl ConfigurationReport {
    pub fn is_sat(&self) -> bool {
        self.verdict == "sat"
    }

    pub fn port(&self, service: &str, port: &str) -> Option<&PortReport> {
        self.services.iter().find(|s| s.name == service)?.ports.iter().find(|p| p.name == port)
    }

    /// The graph with every port replaced by its configured term.
    pub fn solved_graph(&self, original: &ServiceGraph) -> ServiceGraph {
        let mut g = original.clone();
        for s in &mut g.services {
            for p in &mut s.ports {
                if let Some(r) = self.port(&s.name, &p.name) {
                    p.term = r.solved_term.clone();
                }
            }
        }
        g
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        if !self.is_sat() {
            out.push_str("UNSAT\n");
            for c in &self.unsat_channels {
                let _ = writeln!(out, "  channel {c}");
            }
            return out;
        }
        out.push_str("SAT\n");
        for (k, v) in &self.bvars {
            let _ = writeln!(out, "{k} = {v}");
        }
        for (k, v) in &self.tvars {
            let _ = writeln!(out, "{k} = {v}");
        }
        for s in &self.services {
            let _ = writeln!(out, "\nservice {}", s.name);
            for p in &s.ports {
                let _ = writeln!(out, "  {} {}: {}", p.direction, p.name, p.solved);
                if !p.dropped.is_empty() {
                    let _ = writeln!(out, "    dropped: {}", p.dropped.join(", "));
                }
                for (var, value) in &p.tail_expansions {
                    let _ = writeln!(out, "    tail {var} = {value}");
                }
            }
        }
        out
    }
}
