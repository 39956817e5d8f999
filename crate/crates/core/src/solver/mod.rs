//! Constraint sets, solutions and the two solving algorithms: the ground
//! fixed point ([`solve_ground`]) and the full procedure with guards and an
//! adjunct Boolean problem ([`solve`]).

mod af;
mod csp;

use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::lattice::{is_senior, ApproximationVector, LatticeError};
use crate::sat::{BoolConstraintSet, Model};
use crate::term::{BoolAssignment, Sort, TVar, Term, TermAssignment, TermError, VariableInventory};
use crate::text::SourceSpan;

pub use af::{af, af_c, solve_ground};
pub use csp::solve;

/// Where a constraint came from.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Origin {
    /// Free-form tag, e.g. a channel name.
    pub label: Option<String>,
    pub file: Option<String>,
    pub span: Option<SourceSpan>,
}

impl Origin {
    pub fn labelled(label: impl Into<String>) -> Self {
        Origin { label: Some(label.into()), ..Origin::default() }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        if let Some(file) = &self.file {
            f.write_str(file)?;
            wrote = true;
        }
        if let Some(span) = &self.span {
            if wrote {
                f.write_str(":")?;
            }
            write!(f, "{}:{}", span.line, span.column)?;
            wrote = true;
        }
        if let Some(label) = &self.label {
            if wrote {
                f.write_str(" ")?;
            }
            f.write_str(label)?;
            wrote = true;
        }
        if !wrote {
            f.write_str("<unknown>")?;
        }
        Ok(())
    }
}

/// `lhs ⊑ rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeniorityConstraint {
    pub lhs: Term,
    pub rhs: Term,
    pub origin: Origin,
}

impl SeniorityConstraint {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        SeniorityConstraint { lhs, rhs, origin: Origin::default() }
    }

    pub fn with_origin(mut self, origin: Origin) -> Self {
        self.origin = origin;
        self
    }

    /// Rejects a variable facing a term of the other sort at the top level.
    pub fn check_sorts(&self) -> Result<(), String> {
        let is_var = |t: &Term| matches!(t, Term::DownVar(_) | Term::UpVar(_));
        if !(is_var(&self.lhs) || is_var(&self.rhs)) {
            return Ok(());
        }
        match (self.lhs.sort(), self.rhs.sort()) {
            (Some(a), Some(b)) if a != b => Err(format!(
                "{} cannot be related to {}",
                self.lhs.kind(),
                self.rhs.kind()
            )),
            _ => Ok(()),
        }
    }
}

/// Constraints in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    pub constraints: Vec<SeniorityConstraint>,
}

impl ConstraintSet {
    pub fn new(constraints: Vec<SeniorityConstraint>) -> Self {
        ConstraintSet { constraints }
    }

    pub fn push(&mut self, c: SeniorityConstraint) {
        self.constraints.push(c);
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SeniorityConstraint> {
        self.constraints.iter()
    }

    /// Variables in first-occurrence order over lhs, then rhs, of each
    /// constraint.
    pub fn inventory(&self) -> VariableInventory {
        let mut inv = VariableInventory::default();
        for c in &self.constraints {
            inv.extend_from_term(&c.lhs);
            inv.extend_from_term(&c.rhs);
        }
        inv
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        for (i, c) in self.constraints.iter().enumerate() {
            c.check_sorts().map_err(|message| SolveError::Sort { constraint: i, message })?;
        }
        Ok(())
    }
}

impl FromIterator<SeniorityConstraint> for ConstraintSet {
    fn from_iter<I: IntoIterator<Item = SeniorityConstraint>>(iter: I) -> Self {
        ConstraintSet::new(iter.into_iter().collect())
    }
}

/// Boolean values plus ground instantiations of every t-variable.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Solution {
    pub bvals: Model,
    pub down: IndexMap<String, Term>,
    pub up: IndexMap<String, Term>,
}

impl Solution {
    pub(crate) fn from_vector(bvals: Model, inv: &VariableInventory, v: &ApproximationVector) -> Self {
        let read = |names: &indexmap::IndexSet<String>, points: &[crate::lattice::LatticePoint]| {
            names
                .iter()
                .zip(points)
                .map(|(n, p)| (n.clone(), p.value().cloned().expect("live vector")))
                .collect()
        };
        Solution { bvals, down: read(&inv.downvars, &v.down), up: read(&inv.upvars, &v.up) }
    }

    pub fn term_assignment(&self) -> TermAssignment {
        let mut m = TermAssignment::new();
        for (k, t) in &self.down {
            m.insert(TVar::down(k.clone()), t.clone());
        }
        for (k, t) in &self.up {
            m.insert(TVar::up(k.clone()), t.clone());
        }
        m
    }

    pub fn get(&self, var: &TVar) -> Option<&Term> {
        match var.sort {
            Sort::Down => self.down.get(&var.name),
            Sort::Up => self.up.get(&var.name),
        }
    }

    /// Substitutes the solution into `t` and canonicalizes.
    pub fn apply(&self, t: &Term) -> Result<Term, TermError> {
        // drop absent elements first: their tails need not be collections
        t.canonicalize(Some(&self.bvals))?
            .substitute(&self.bvals, &self.term_assignment())?
            .canonicalize(Some(&self.bvals))
    }

    /// Checks every constraint after substitution; returns the index of the
    /// first violated one together with a description.
    pub fn audit(&self, cs: &ConstraintSet) -> Result<(), (usize, String)> {
        for (i, c) in cs.iter().enumerate() {
            let side = |t: &Term| {
                let s = self.apply(t).map_err(|e| (i, e.to_string()))?;
                match s.is_well_formed() {
                    Ok(true) => Ok(s),
                    Ok(false) => Err((i, format!("instance `{s}` is ill formed"))),
                    Err(e) => Err((i, format!("instance `{s}`: {e}"))),
                }
            };
            let (l, r) = (side(&c.lhs)?, side(&c.rhs)?);
            if !is_senior(&l, &r) {
                return Err((i, format!("`{l}` is not junior to `{r}`")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("constraint {constraint}: sort error: {message}")]
    Sort { constraint: usize, message: String },
    #[error("no fixed point after {limit} iterations")]
    IterationLimitExceeded { limit: usize },
    #[error("solution fails constraint {constraint}: {detail}")]
    VerificationFailure { constraint: usize, detail: String },
    #[error("approximation moved upwards at iteration {iteration}")]
    MonotonicityViolation { iteration: usize },
    #[error("constraint set still has b-variables: {0}")]
    NotGround(String),
    #[error("unknown t-variable `{0}`")]
    UnknownVariable(TVar),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOptions {
    pub max_iters: usize,
    /// Record per-iteration snapshots.
    pub trace: bool,
    /// Spread per-cell work over threads (needs the `parallel` feature).
    pub parallel: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { max_iters: 10_000, trace: false, parallel: crate::par::AVAILABLE }
    }
}

/// Why a constraint set has no solution.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UnsatInfo {
    /// Constraints that eliminated some Boolean case, in discovery order.
    pub culprits: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Sat(Solution),
    Unsat(UnsatInfo),
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat(_))
    }

    pub fn solution(&self) -> Option<&Solution> {
        match self {
            Verdict::Sat(s) => Some(s),
            Verdict::Unsat(_) => None,
        }
    }
}

/// Snapshot of one Boolean case at the end of an iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellSnapshot {
    pub cube: BoolAssignment,
    pub approx: ApproximationVector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub iteration: usize,
    pub cells: Vec<CellSnapshot>,
    pub adjunct_size: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub iterations: usize,
    /// Boolean cases the guards split the problem into.
    pub cells: usize,
    pub sat_calls: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub verdict: Verdict,
    pub stats: SolveStats,
    pub trace: Vec<TraceStep>,
    /// Final adjunct Boolean constraint set.
    pub adjunct: BoolConstraintSet,
    pub inventory: VariableInventory,
}
