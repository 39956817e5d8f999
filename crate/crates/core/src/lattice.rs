//! Seniority order on ground canonical terms and the two semilattices it
//! forms: down-coerced terms under meet (with `nil` on top) and choices
//! under join (with `none` at the bottom).
//!
//! Functions here assume their inputs are ground, canonical and well formed:
//! every element is present and no switches remain. Record and choice
//! elements are compared as sets; [`normalize`] sorts them by label.

use std::fmt;

use thiserror::Error;

use crate::term::{Collection, Element, Sort, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("expected a {expected:?}-coerced lattice point, found {found}")]
    SortError { expected: Sort, found: String },
    #[error("vector lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}

/// A slot of the approximation: a ground term or one of the two sentinels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LatticePoint {
    /// Below every down-coerced term.
    Bottom,
    /// Above every choice.
    Top,
    Value(Term),
}

impl LatticePoint {
    pub fn value(&self) -> Option<&Term> {
        match self {
            LatticePoint::Value(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_sentinel(&self) -> bool {
        !matches!(self, LatticePoint::Value(_))
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticePoint::Bottom => f.write_str("⊥"),
            LatticePoint::Top => f.write_str("⊤"),
            LatticePoint::Value(t) => write!(f, "{t}"),
        }
    }
}

/// Sorts the elements of every record and choice by label.
pub fn normalize(t: &Term) -> Term {
    match t {
        Term::Tuple(items) => Term::Tuple(items.iter().map(normalize).collect()),
        Term::Record(c) => Term::Record(normalize_collection(c)),
        Term::Choice(c) => Term::Choice(normalize_collection(c)),
        Term::Switch(alts) => Term::Switch(
            alts.iter()
                .map(|a| crate::term::Alternative { guard: a.guard.clone(), term: normalize(&a.term) })
                .collect(),
        ),
        other => other.clone(),
    }
}

fn normalize_collection(c: &Collection) -> Collection {
    let mut elements: Vec<Element> = c
        .elements
        .iter()
        .map(|e| Element { label: e.label.clone(), guard: e.guard.clone(), term: normalize(&e.term) })
        .collect();
    elements.sort_by(|a, b| a.label.cmp(&b.label).then_with(|| a.term.cmp(&b.term)));
    Collection { elements, tail: c.tail.clone() }
}

fn is_down_term(t: &Term) -> bool {
    matches!(t, Term::Symbol(_) | Term::Tuple(_) | Term::Record(_))
}

/// `t1 ⊑ t2` on ground canonical terms.
pub fn is_senior(t1: &Term, t2: &Term) -> bool {
    match (t1, t2) {
        (Term::Choice(c), Term::Choice(_)) if c.elements.is_empty() => true,
        (t, Term::Record(c)) if c.elements.is_empty() && is_down_term(t) => true,
        (Term::Symbol(a), Term::Symbol(b)) => a == b,
        (Term::Tuple(a), Term::Tuple(b)) => {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| is_senior(x, y))
        }
        // Every label of the senior record occurs in the junior one.
        (Term::Record(a), Term::Record(b)) => b.elements.iter().all(|eb| {
            a.elements.iter().any(|ea| ea.label == eb.label && is_senior(&ea.term, &eb.term))
        }),
        // Every label of the junior choice occurs in the senior one.
        (Term::Choice(a), Term::Choice(b)) => a.elements.iter().all(|ea| {
            b.elements.iter().any(|eb| ea.label == eb.label && is_senior(&ea.term, &eb.term))
        }),
        _ => false,
    }
}

/// Greatest lower bound of two ground terms of any category, `None` when
/// they have no common junior.
pub(crate) fn glb(t1: &Term, t2: &Term) -> Option<Term> {
    match (t1, t2) {
        (a, b) if a == b => Some(normalize(a)),
        (t, n) | (n, t) if n.is_nil() && is_down_term(t) => Some(normalize(t)),
        (Term::Symbol(_), Term::Symbol(_)) => None,
        (Term::Tuple(a), Term::Tuple(b)) if a.len() == b.len() => a
            .iter()
            .zip(b)
            .map(|(x, y)| glb(x, y))
            .collect::<Option<Vec<_>>>()
            .map(Term::Tuple),
        (Term::Record(a), Term::Record(b)) => {
            let mut out: Vec<Element> = Vec::new();
            for ea in &a.elements {
                let term = match b.get(&ea.label) {
                    Some(eb) => glb(&ea.term, &eb.term)?,
                    None => normalize(&ea.term),
                };
                out.push(Element::new(ea.label.clone(), term));
            }
            for eb in &b.elements {
                if a.get(&eb.label).is_none() {
                    out.push(Element::new(eb.label.clone(), normalize(&eb.term)));
                }
            }
            Some(sorted_record(out, Term::Record))
        }
        (Term::Choice(a), Term::Choice(b)) => {
            // Labels whose payloads have no common junior are left out: a
            // smaller choice is still junior to both.
            let out = a
                .elements
                .iter()
                .filter_map(|ea| {
                    let eb = b.get(&ea.label)?;
                    Some(Element::new(ea.label.clone(), glb(&ea.term, &eb.term)?))
                })
                .collect();
            Some(sorted_record(out, Term::Choice))
        }
        _ => None,
    }
}

/// Least upper bound of two ground terms of any category, `None` when they
/// have no common senior (only possible across sorts).
pub(crate) fn lub(t1: &Term, t2: &Term) -> Option<Term> {
    match (t1, t2) {
        (a, b) if a == b => Some(normalize(a)),
        (n, t) | (t, n) if n.is_none() && matches!(t, Term::Choice(_)) => Some(normalize(t)),
        (Term::Tuple(a), Term::Tuple(b)) if a.len() == b.len() => Some(
            a.iter()
                .zip(b)
                .map(|(x, y)| lub(x, y))
                .collect::<Option<Vec<_>>>()
                .map(Term::Tuple)
                .unwrap_or_else(Term::nil),
        ),
        (Term::Record(a), Term::Record(b)) => {
            let out = a
                .elements
                .iter()
                .filter_map(|ea| {
                    let eb = b.get(&ea.label)?;
                    Some(Element::new(ea.label.clone(), lub(&ea.term, &eb.term)?))
                })
                .collect();
            Some(sorted_record(out, Term::Record))
        }
        (Term::Choice(a), Term::Choice(b)) => {
            let mut out: Vec<Element> = Vec::new();
            for ea in &a.elements {
                let term = match b.get(&ea.label) {
                    Some(eb) => lub(&ea.term, &eb.term)?,
                    None => normalize(&ea.term),
                };
                out.push(Element::new(ea.label.clone(), term));
            }
            for eb in &b.elements {
                if a.get(&eb.label).is_none() {
                    out.push(Element::new(eb.label.clone(), normalize(&eb.term)));
                }
            }
            Some(sorted_record(out, Term::Choice))
        }
        (a, b) if is_down_term(a) && is_down_term(b) => Some(Term::nil()),
        _ => None,
    }
}

fn sorted_record(mut elements: Vec<Element>, wrap: fn(Collection) -> Term) -> Term {
    elements.sort_by(|a, b| a.label.cmp(&b.label));
    wrap(Collection::new(elements))
}

fn expect_sort(p: &LatticePoint, sort: Sort) -> Result<(), LatticeError> {
    let ok = match (p, sort) {
        (LatticePoint::Bottom, Sort::Down) | (LatticePoint::Top, Sort::Up) => true,
        (LatticePoint::Value(t), Sort::Down) => is_down_term(t),
        (LatticePoint::Value(t), Sort::Up) => matches!(t, Term::Choice(_)),
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        let found = match p {
            LatticePoint::Bottom => "bottom".to_string(),
            LatticePoint::Top => "top".to_string(),
            LatticePoint::Value(t) => t.kind().to_string(),
        };
        Err(LatticeError::SortError { expected: sort, found })
    }
}

/// Meet of two down-coerced points. `nil` is the identity, `⊥` absorbs.
pub fn meet(p1: &LatticePoint, p2: &LatticePoint) -> Result<LatticePoint, LatticeError> {
    expect_sort(p1, Sort::Down)?;
    expect_sort(p2, Sort::Down)?;
    Ok(match (p1, p2) {
        (LatticePoint::Value(a), LatticePoint::Value(b)) => {
            glb(a, b).map_or(LatticePoint::Bottom, LatticePoint::Value)
        }
        _ => LatticePoint::Bottom,
    })
}

/// Join of two up-coerced points. `none` is the identity, `⊤` absorbs.
pub fn join(p1: &LatticePoint, p2: &LatticePoint) -> Result<LatticePoint, LatticeError> {
    expect_sort(p1, Sort::Up)?;
    expect_sort(p2, Sort::Up)?;
    Ok(match (p1, p2) {
        (LatticePoint::Value(a), LatticePoint::Value(b)) => {
            lub(a, b).map_or(LatticePoint::Top, LatticePoint::Value)
        }
        _ => LatticePoint::Top,
    })
}

/// `p1 ⊑ p2` including the sentinels.
pub fn point_leq(p1: &LatticePoint, p2: &LatticePoint) -> bool {
    match (p1, p2) {
        (LatticePoint::Bottom, _) | (_, LatticePoint::Top) => true,
        (LatticePoint::Value(a), LatticePoint::Value(b)) => is_senior(a, b),
        _ => false,
    }
}

/// Current approximation of every t-variable, indexed by inventory order.
///
/// The refinement order used by [`vector_leq`], [`vector_meet`] and
/// [`vector_join`] runs in the direction of the solver: `a ≤ b` when every
/// down slot of `a` is junior to the one of `b` and every up slot of `a` is
/// senior to the one of `b`. The collapsed vector (all slots at their
/// sentinels) is the least element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ApproximationVector {
    pub down: Vec<LatticePoint>,
    pub up: Vec<LatticePoint>,
    collapsed: bool,
}

impl ApproximationVector {
    /// `((nil, …), (none, …))`.
    pub fn initial(down: usize, up: usize) -> Self {
        ApproximationVector {
            down: vec![LatticePoint::Value(Term::nil()); down],
            up: vec![LatticePoint::Value(Term::none()); up],
            collapsed: false,
        }
    }

    /// `(⊥, ⊤)`.
    pub fn collapsed(down: usize, up: usize) -> Self {
        ApproximationVector {
            down: vec![LatticePoint::Bottom; down],
            up: vec![LatticePoint::Top; up],
            collapsed: true,
        }
    }

    pub fn from_points(down: Vec<LatticePoint>, up: Vec<LatticePoint>) -> Self {
        let mut v = ApproximationVector { down, up, collapsed: false };
        v.settle();
        v
    }

    pub fn is_collapsed(&self) -> bool {
        self.collapsed
    }

    /// Collapses the whole vector once any slot reaches its sentinel.
    pub(crate) fn settle(&mut self) {
        if self.collapsed || self.down.iter().chain(&self.up).any(LatticePoint::is_sentinel) {
            *self = ApproximationVector::collapsed(self.down.len(), self.up.len());
        }
    }

    pub(crate) fn collapse(&mut self) {
        *self = ApproximationVector::collapsed(self.down.len(), self.up.len());
    }

    fn check_shape(&self, other: &Self) -> Result<(), LatticeError> {
        if self.down.len() != other.down.len() {
            return Err(LatticeError::LengthMismatch { left: self.down.len(), right: other.down.len() });
        }
        if self.up.len() != other.up.len() {
            return Err(LatticeError::LengthMismatch { left: self.up.len(), right: other.up.len() });
        }
        Ok(())
    }
}

/// Pointwise combination towards the solver's direction: meet on down
/// slots, join on up slots.
pub fn vector_meet(
    a: &ApproximationVector,
    b: &ApproximationVector,
) -> Result<ApproximationVector, LatticeError> {
    a.check_shape(b)?;
    if a.collapsed || b.collapsed {
        return Ok(ApproximationVector::collapsed(a.down.len(), a.up.len()));
    }
    let down = a.down.iter().zip(&b.down).map(|(x, y)| meet(x, y)).collect::<Result<_, _>>()?;
    let up = a.up.iter().zip(&b.up).map(|(x, y)| join(x, y)).collect::<Result<_, _>>()?;
    Ok(ApproximationVector::from_points(down, up))
}

/// Pointwise combination away from the solver's direction: least upper
/// bound on down slots, greatest lower bound on up slots.
pub fn vector_join(
    a: &ApproximationVector,
    b: &ApproximationVector,
) -> Result<ApproximationVector, LatticeError> {
    a.check_shape(b)?;
    if a.collapsed {
        return Ok(b.clone());
    }
    if b.collapsed {
        return Ok(a.clone());
    }
    let pick = |x: &LatticePoint, y: &LatticePoint, f: fn(&Term, &Term) -> Option<Term>| match (x, y) {
        (LatticePoint::Value(p), LatticePoint::Value(q)) => f(p, q).map(LatticePoint::Value),
        _ => None,
    };
    let down = a
        .down
        .iter()
        .zip(&b.down)
        .map(|(x, y)| pick(x, y, lub).unwrap_or(LatticePoint::Value(Term::nil())))
        .collect();
    let up = a
        .up
        .iter()
        .zip(&b.up)
        .map(|(x, y)| pick(x, y, glb).unwrap_or(LatticePoint::Value(Term::none())))
        .collect();
    Ok(ApproximationVector { down, up, collapsed: false })
}

/// Refinement order: `a.down ⊑ b.down` and `b.up ⊑ a.up` pointwise.
pub fn vector_leq(a: &ApproximationVector, b: &ApproximationVector) -> Result<bool, LatticeError> {
    a.check_shape(b)?;
    if a.collapsed {
        return Ok(true);
    }
    if b.collapsed {
        return Ok(false);
    }
    Ok(a.down.iter().zip(&b.down).all(|(x, y)| point_leq(x, y))
        && a.up.iter().zip(&b.up).all(|(x, y)| point_leq(y, x)))
}

/// Structural equality up to element order.
pub fn same_term(a: &Term, b: &Term) -> bool {
    normalize(a) == normalize(b)
}

/// Strips guards from a term whose guards are all `true`.
pub(crate) fn strip_guards(t: &Term) -> Option<Term> {
    match t {
        Term::Tuple(items) => items.iter().map(strip_guards).collect::<Option<_>>().map(Term::Tuple),
        Term::Record(c) | Term::Choice(c) => {
            let elements = c
                .elements
                .iter()
                .map(|e| {
                    e.guard.is_true().then_some(())?;
                    Some(Element::new(e.label.clone(), strip_guards(&e.term)?))
                })
                .collect::<Option<Vec<_>>>()?;
            let c = Collection { elements, tail: c.tail.clone() };
            Some(if matches!(t, Term::Record(_)) { Term::Record(c) } else { Term::Choice(c) })
        }
        Term::Switch(_) => None,
        other => Some(other.clone()),
    }
}
