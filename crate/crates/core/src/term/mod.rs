//! The MDL term algebra: symbols, tuples, guarded records and choices,
//! switches and t-variables, together with substitution, canonical form and
//! the well-formedness check.

mod guard;

use std::collections::BTreeMap;
use std::fmt;

use indexmap::IndexSet;
use thiserror::Error;

pub use guard::{BoolAssignment, Guard};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("b-variable `{0}` is not assigned")]
    MissingVariable(String),
    #[error("variable `{var}` cannot be bound to {found}")]
    SortMismatch { var: TVar, found: String },
    #[error("tail variable `{var}` bound to non-collection {found}")]
    TailNotCollection { var: TVar, found: String },
    #[error("switch has {true_count} alternatives with a true guard")]
    IllFormedSwitch { true_count: usize },
    #[error("term is not ground")]
    NotGround,
    #[error("guard `{0}` is not constant")]
    NonConstantGuard(Guard),
}

/// Coercion sort of a t-variable or of a term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sort {
    /// Symbols, tuples, records (`$v`).
    Down,
    /// Choices (`^v`).
    Up,
}

/// A t-variable together with its sort; `$v` and `^v` are distinct variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TVar {
    pub sort: Sort,
    pub name: String,
}

impl TVar {
    pub fn down(name: impl Into<String>) -> Self {
        TVar { sort: Sort::Down, name: name.into() }
    }

    pub fn up(name: impl Into<String>) -> Self {
        TVar { sort: Sort::Up, name: name.into() }
    }
}

impl fmt::Display for TVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sort {
            Sort::Down => write!(f, "${}", self.name),
            Sort::Up => write!(f, "^{}", self.name),
        }
    }
}

/// Simultaneous replacement map for t-variables.
pub type TermAssignment = BTreeMap<TVar, Term>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    pub label: String,
    pub guard: Guard,
    pub term: Term,
}

impl Element {
    pub fn new(label: impl Into<String>, term: Term) -> Self {
        Element { label: label.into(), guard: Guard::Const(true), term }
    }

    pub fn guarded(label: impl Into<String>, guard: Guard, term: Term) -> Self {
        Element { label: label.into(), guard, term }
    }
}

/// Element list of a record or choice plus an optional tail variable. The
/// tail's sort is implied by the enclosing constructor.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Collection {
    pub elements: Vec<Element>,
    pub tail: Option<String>,
}

impl Collection {
    pub fn new(elements: Vec<Element>) -> Self {
        Collection { elements, tail: None }
    }

    pub fn with_tail(elements: Vec<Element>, tail: impl Into<String>) -> Self {
        Collection { elements, tail: Some(tail.into()) }
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty() && self.tail.is_none()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.elements.iter().map(|e| e.label.as_str())
    }

    pub fn get(&self, label: &str) -> Option<&Element> {
        self.elements.iter().find(|e| e.label == label)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alternative {
    pub guard: Guard,
    pub term: Term,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Symbol(String),
    Tuple(Vec<Term>),
    Record(Collection),
    Choice(Collection),
    Switch(Vec<Alternative>),
    DownVar(String),
    UpVar(String),
}

impl Term {
    pub fn symbol(name: impl Into<String>) -> Term {
        Term::Symbol(name.into())
    }

    /// The empty record.
    pub fn nil() -> Term {
        Term::Record(Collection::default())
    }

    /// The empty choice.
    pub fn none() -> Term {
        Term::Choice(Collection::default())
    }

    pub fn record(elements: Vec<Element>) -> Term {
        Term::Record(Collection::new(elements))
    }

    pub fn choice(elements: Vec<Element>) -> Term {
        Term::Choice(Collection::new(elements))
    }

    pub fn down_var(name: impl Into<String>) -> Term {
        Term::DownVar(name.into())
    }

    pub fn up_var(name: impl Into<String>) -> Term {
        Term::UpVar(name.into())
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, Term::Record(c) if c.is_empty())
    }

    pub fn is_none(&self) -> bool {
        matches!(self, Term::Choice(c) if c.is_empty())
    }

    /// Sort of the term; a switch has the sort of its alternatives when they
    /// agree.
    pub fn sort(&self) -> Option<Sort> {
        match self {
            Term::Symbol(_) | Term::Tuple(_) | Term::Record(_) | Term::DownVar(_) => {
                Some(Sort::Down)
            }
            Term::Choice(_) | Term::UpVar(_) => Some(Sort::Up),
            Term::Switch(alts) => {
                let mut sorts = alts.iter().map(|a| a.term.sort());
                let first = sorts.next()??;
                sorts.all(|s| s == Some(first)).then_some(first)
            }
        }
    }

    /// Short description used in diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Term::Symbol(_) => "symbol",
            Term::Tuple(_) => "tuple",
            Term::Record(_) => "record",
            Term::Choice(_) => "choice",
            Term::Switch(_) => "switch",
            Term::DownVar(_) => "down-coerced variable",
            Term::UpVar(_) => "up-coerced variable",
        }
    }

    pub fn variables(&self) -> VariableInventory {
        let mut inv = VariableInventory::default();
        inv.extend_from_term(self);
        inv
    }

    pub fn is_semi_ground(&self) -> bool {
        let inv = self.variables();
        inv.downvars.is_empty() && inv.upvars.is_empty()
    }

    pub fn is_ground(&self) -> bool {
        self.variables().is_empty()
    }

    /// Simultaneous substitution of b-variables and t-variables.
    ///
    /// A record (choice) bound to a tail variable is spliced into the host
    /// collection; a switch bound to a tail lifts the host into a switch.
    pub fn substitute(
        &self,
        bmap: &BoolAssignment,
        tmap: &TermAssignment,
    ) -> Result<Term, TermError> {
        Ok(match self {
            Term::Symbol(s) => Term::Symbol(s.clone()),
            Term::Tuple(items) => Term::Tuple(
                items
                    .iter()
                    .map(|t| t.substitute(bmap, tmap))
                    .collect::<Result<_, _>>()?,
            ),
            Term::Record(c) => substitute_collection(c, Sort::Down, bmap, tmap)?,
            Term::Choice(c) => substitute_collection(c, Sort::Up, bmap, tmap)?,
            Term::Switch(alts) => Term::Switch(
                alts.iter()
                    .map(|a| {
                        Ok(Alternative {
                            guard: a.guard.assign(bmap),
                            term: a.term.substitute(bmap, tmap)?,
                        })
                    })
                    .collect::<Result<_, TermError>>()?,
            ),
            Term::DownVar(v) => lookup(TVar::down(v.clone()), tmap)?,
            Term::UpVar(v) => lookup(TVar::up(v.clone()), tmap)?,
        })
    }

    /// Canonical form: false-guarded elements are dropped, true guards are
    /// normalised to `true`, and each switch is replaced by its unique true
    /// alternative. Guards that stay symbolic (no assignment supplied) are
    /// kept, as are switches whose choice is still open.
    pub fn canonicalize(&self, bmap: Option<&BoolAssignment>) -> Result<Term, TermError> {
        let empty = BoolAssignment::new();
        let bmap = bmap.unwrap_or(&empty);
        self.canonical(bmap)
    }

    fn canonical(&self, bmap: &BoolAssignment) -> Result<Term, TermError> {
        Ok(match self {
            Term::Symbol(_) | Term::DownVar(_) | Term::UpVar(_) => self.clone(),
            Term::Tuple(items) => Term::Tuple(
                items.iter().map(|t| t.canonical(bmap)).collect::<Result<_, _>>()?,
            ),
            Term::Record(c) => Term::Record(canonical_collection(c, bmap)?),
            Term::Choice(c) => Term::Choice(canonical_collection(c, bmap)?),
            Term::Switch(alts) => {
                let mut open = Vec::new();
                let mut chosen = Vec::new();
                for alt in alts {
                    match alt.guard.assign(bmap) {
                        Guard::Const(false) => {}
                        Guard::Const(true) => chosen.push(&alt.term),
                        guard => open.push(Alternative { guard, term: alt.term.canonical(bmap)? }),
                    }
                }
                match (chosen.len(), open.is_empty()) {
                    (1, true) => chosen[0].canonical(bmap)?,
                    (0, false) => Term::Switch(open),
                    (n, _) if n >= 2 => return Err(TermError::IllFormedSwitch { true_count: n }),
                    (1, false) => {
                        // The remaining open guards must all be false for the
                        // term to be well formed; keep the alternatives so that
                        // the constraint generator still sees them.
                        let mut rest = open;
                        rest.insert(
                            0,
                            Alternative { guard: Guard::Const(true), term: chosen[0].canonical(bmap)? },
                        );
                        Term::Switch(rest)
                    }
                    _ => return Err(TermError::IllFormedSwitch { true_count: 0 }),
                }
            }
        })
    }

    /// Well-formedness of a ground term: no two present elements of a
    /// collection share a label, and each switch has exactly one true guard.
    pub fn is_well_formed(&self) -> Result<bool, TermError> {
        if !self.is_ground() {
            return Err(TermError::NotGround);
        }
        Ok(self.well_formed_ground())
    }

    fn well_formed_ground(&self) -> bool {
        let holds = |g: &Guard| g.constant_value().unwrap_or(false);
        match self {
            Term::Symbol(_) => true,
            Term::Tuple(items) => !items.is_empty() && items.iter().all(Term::well_formed_ground),
            Term::Record(c) | Term::Choice(c) => {
                let present: Vec<&Element> = c.elements.iter().filter(|e| holds(&e.guard)).collect();
                let mut labels = std::collections::HashSet::new();
                present.iter().all(|e| labels.insert(e.label.as_str()))
                    && present.iter().all(|e| e.term.well_formed_ground())
            }
            Term::Switch(alts) => {
                let chosen: Vec<&Alternative> = alts.iter().filter(|a| holds(&a.guard)).collect();
                chosen.len() == 1 && chosen[0].term.well_formed_ground()
            }
            Term::DownVar(_) | Term::UpVar(_) => false,
        }
    }
}

fn lookup(var: TVar, tmap: &TermAssignment) -> Result<Term, TermError> {
    let Some(value) = tmap.get(&var) else {
        return Ok(match var.sort {
            Sort::Down => Term::DownVar(var.name),
            Sort::Up => Term::UpVar(var.name),
        });
    };
    match value.sort() {
        Some(s) if s == var.sort => Ok(value.clone()),
        _ => Err(TermError::SortMismatch { var, found: value.kind().to_string() }),
    }
}

fn substitute_collection(
    c: &Collection,
    sort: Sort,
    bmap: &BoolAssignment,
    tmap: &TermAssignment,
) -> Result<Term, TermError> {
    let elements = c
        .elements
        .iter()
        .map(|e| {
            Ok(Element {
                label: e.label.clone(),
                guard: e.guard.assign(bmap),
                term: e.term.substitute(bmap, tmap)?,
            })
        })
        .collect::<Result<Vec<_>, TermError>>()?;
    let wrap = |c: Collection| match sort {
        Sort::Down => Term::Record(c),
        Sort::Up => Term::Choice(c),
    };
    let Some(tail) = &c.tail else {
        return Ok(wrap(Collection::new(elements)));
    };
    let var = TVar { sort, name: tail.clone() };
    match tmap.get(&var) {
        None => Ok(wrap(Collection { elements, tail: Some(tail.clone()) })),
        Some(value) => splice(elements, var, value, sort).map(|t| t.unwrap_or_else(|c| wrap(c))),
    }
}

/// Splices `value` into a host element list. Returns either a finished term
/// (a lifted switch) or the merged collection.
fn splice(
    host: Vec<Element>,
    var: TVar,
    value: &Term,
    sort: Sort,
) -> Result<Result<Term, Collection>, TermError> {
    match (value, sort) {
        (Term::Record(c), Sort::Down) | (Term::Choice(c), Sort::Up) => {
            let mut elements = host;
            elements.extend(c.elements.iter().cloned());
            Ok(Err(Collection { elements, tail: c.tail.clone() }))
        }
        (Term::DownVar(v), Sort::Down) | (Term::UpVar(v), Sort::Up) => {
            Ok(Err(Collection { elements: host, tail: Some(v.clone()) }))
        }
        (Term::Switch(alts), _) => {
            let lifted = alts
                .iter()
                .map(|a| {
                    let inner = splice(host.clone(), var.clone(), &a.term, sort)?;
                    let term = inner.unwrap_or_else(|c| match sort {
                        Sort::Down => Term::Record(c),
                        Sort::Up => Term::Choice(c),
                    });
                    Ok(Alternative { guard: a.guard.clone(), term })
                })
                .collect::<Result<_, TermError>>()?;
            Ok(Ok(Term::Switch(lifted)))
        }
        (other, _) if other.sort() == Some(sort) => {
            Err(TermError::TailNotCollection { var, found: other.kind().to_string() })
        }
        (other, _) => Err(TermError::SortMismatch { var, found: other.kind().to_string() }),
    }
}

fn canonical_collection(c: &Collection, bmap: &BoolAssignment) -> Result<Collection, TermError> {
    let mut elements = Vec::with_capacity(c.elements.len());
    for e in &c.elements {
        let guard = e.guard.assign(bmap);
        if guard.is_false() {
            continue;
        }
        elements.push(Element { label: e.label.clone(), guard, term: e.term.canonical(bmap)? });
    }
    Ok(Collection { elements, tail: c.tail.clone() })
}

/// The b-variables and the two kinds of t-variables of a term or constraint
/// set, each in first-occurrence order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VariableInventory {
    pub bvars: IndexSet<String>,
    pub downvars: IndexSet<String>,
    pub upvars: IndexSet<String>,
}

impl VariableInventory {
    pub fn is_empty(&self) -> bool {
        self.bvars.is_empty() && self.downvars.is_empty() && self.upvars.is_empty()
    }

    pub fn extend_from_guard(&mut self, g: &Guard) {
        g.collect_variables(&mut self.bvars);
    }

    pub fn extend_from_term(&mut self, t: &Term) {
        match t {
            Term::Symbol(_) => {}
            Term::Tuple(items) => items.iter().for_each(|i| self.extend_from_term(i)),
            Term::Record(c) | Term::Choice(c) => {
                for e in &c.elements {
                    self.extend_from_guard(&e.guard);
                    self.extend_from_term(&e.term);
                }
                if let Some(tail) = &c.tail {
                    if matches!(t, Term::Record(_)) {
                        self.downvars.insert(tail.clone());
                    } else {
                        self.upvars.insert(tail.clone());
                    }
                }
            }
            Term::Switch(alts) => {
                for a in alts {
                    self.extend_from_guard(&a.guard);
                    self.extend_from_term(&a.term);
                }
            }
            Term::DownVar(v) => {
                self.downvars.insert(v.clone());
            }
            Term::UpVar(v) => {
                self.upvars.insert(v.clone());
            }
        }
    }
}

/// Free-standing form of [`Term::variables`].
pub fn collect_variables(t: &Term) -> VariableInventory {
    t.variables()
}

/// Free-standing form of [`Guard::evaluate`].
pub fn evaluate_guard(g: &Guard, assignment: &BoolAssignment) -> Result<bool, TermError> {
    g.evaluate(assignment)
}
