use std::collections::BTreeMap;
use std::fmt;

use indexmap::IndexSet;

use super::TermError;

/// Total or partial assignment of Boolean values to b-variables.
pub type BoolAssignment = BTreeMap<String, bool>;

/// Boolean expression over b-variables, attached to collection elements and
/// switch alternatives.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Guard {
    Const(bool),
    Var(String),
    Not(Box<Guard>),
    And(Box<Guard>, Box<Guard>),
    Or(Box<Guard>, Box<Guard>),
    Implies(Box<Guard>, Box<Guard>),
}

impl Default for Guard {
    fn default() -> Self {
        Guard::Const(true)
    }
}

impl Guard {
    pub fn var(name: impl Into<String>) -> Guard {
        Guard::Var(name.into())
    }

    pub fn not(g: Guard) -> Guard {
        Guard::Not(Box::new(g))
    }

    pub fn and(a: Guard, b: Guard) -> Guard {
        Guard::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Guard, b: Guard) -> Guard {
        Guard::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Guard, b: Guard) -> Guard {
        Guard::Implies(Box::new(a), Box::new(b))
    }

    /// Conjunction that folds constant operands.
    pub fn and_simplified(a: Guard, b: Guard) -> Guard {
        match (a, b) {
            (Guard::Const(true), g) | (g, Guard::Const(true)) => g,
            (Guard::Const(false), _) | (_, Guard::Const(false)) => Guard::Const(false),
            (a, b) => Guard::and(a, b),
        }
    }

    /// Disjunction that folds constant operands.
    pub fn or_simplified(a: Guard, b: Guard) -> Guard {
        match (a, b) {
            (Guard::Const(false), g) | (g, Guard::Const(false)) => g,
            (Guard::Const(true), _) | (_, Guard::Const(true)) => Guard::Const(true),
            (a, b) => Guard::or(a, b),
        }
    }

    /// Implication that folds constant operands.
    pub fn implies_simplified(a: Guard, b: Guard) -> Guard {
        match (a, b) {
            (Guard::Const(true), g) => g,
            (Guard::Const(false), _) | (_, Guard::Const(true)) => Guard::Const(true),
            (a, Guard::Const(false)) => Guard::not_simplified(a),
            (a, b) => Guard::implies(a, b),
        }
    }

    pub fn not_simplified(g: Guard) -> Guard {
        match g {
            Guard::Const(b) => Guard::Const(!b),
            Guard::Not(inner) => *inner,
            g => Guard::not(g),
        }
    }

    /// Disjunction of a list; empty list is `false`. Built as a balanced
    /// tree so long lists stay shallow.
    pub fn any(items: impl IntoIterator<Item = Guard>) -> Guard {
        balanced(items.into_iter().collect(), Guard::Const(false), Guard::or_simplified)
    }

    /// Conjunction of a list; empty list is `true`.
    pub fn all(items: impl IntoIterator<Item = Guard>) -> Guard {
        balanced(items.into_iter().collect(), Guard::Const(true), Guard::and_simplified)
    }

    /// The literals of a conjunction of literals, or `None` for any other shape.
    pub fn cube_literals(&self) -> Option<Vec<(&str, bool)>> {
        match self {
            Guard::Var(v) => Some(vec![(v, true)]),
            Guard::Not(inner) => match &**inner {
                Guard::Var(v) => Some(vec![(v, false)]),
                _ => None,
            },
            Guard::And(a, b) => {
                let mut l = a.cube_literals()?;
                l.extend(b.cube_literals()?);
                Some(l)
            }
            _ => None,
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Guard::Const(true))
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Guard::Const(false))
    }

    /// Variables in first-occurrence (preorder) order.
    pub fn variables(&self) -> IndexSet<String> {
        let mut out = IndexSet::new();
        self.collect_variables(&mut out);
        out
    }

    pub(crate) fn collect_variables(&self, out: &mut IndexSet<String>) {
        match self {
            Guard::Const(_) => {}
            Guard::Var(v) => {
                out.insert(v.clone());
            }
            Guard::Not(g) => g.collect_variables(out),
            Guard::And(a, b) | Guard::Or(a, b) | Guard::Implies(a, b) => {
                a.collect_variables(out);
                b.collect_variables(out);
            }
        }
    }

    /// Evaluates the guard under an assignment covering all its variables.
    pub fn evaluate(&self, assignment: &BoolAssignment) -> Result<bool, TermError> {
        Ok(match self {
            Guard::Const(b) => *b,
            Guard::Var(v) => *assignment
                .get(v)
                .ok_or_else(|| TermError::MissingVariable(v.clone()))?,
            Guard::Not(g) => !g.evaluate(assignment)?,
            Guard::And(a, b) => a.evaluate(assignment)? & b.evaluate(assignment)?,
            Guard::Or(a, b) => a.evaluate(assignment)? | b.evaluate(assignment)?,
            Guard::Implies(a, b) => !a.evaluate(assignment)? | b.evaluate(assignment)?,
        })
    }

    /// Replaces assigned variables by constants and folds constant subterms.
    /// Unassigned variables stay symbolic.
    pub fn assign(&self, assignment: &BoolAssignment) -> Guard {
        match self {
            Guard::Const(b) => Guard::Const(*b),
            Guard::Var(v) => match assignment.get(v) {
                Some(b) => Guard::Const(*b),
                None => Guard::Var(v.clone()),
            },
            Guard::Not(g) => Guard::not_simplified(g.assign(assignment)),
            Guard::And(a, b) => Guard::and_simplified(a.assign(assignment), b.assign(assignment)),
            Guard::Or(a, b) => Guard::or_simplified(a.assign(assignment), b.assign(assignment)),
            Guard::Implies(a, b) => {
                Guard::implies_simplified(a.assign(assignment), b.assign(assignment))
            }
        }
    }

    /// Constant value of a variable-free guard.
    pub fn constant_value(&self) -> Option<bool> {
        match self.assign(&BoolAssignment::new()) {
            Guard::Const(b) => Some(b),
            _ => None,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Guard::Implies(..) => 1,
            Guard::Or(..) => 2,
            Guard::And(..) => 3,
            Guard::Not(_) => 4,
            Guard::Const(_) | Guard::Var(_) => 5,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Guard::Const(b) => write!(f, "{b}"),
            Guard::Var(v) => write!(f, "{v}"),
            Guard::Not(g) => {
                f.write_str("!")?;
                g.fmt_child(f, 4)
            }
            // `&&` and `||` parse left-associatively, `->` right-associatively.
            Guard::And(a, b) => {
                a.fmt_child(f, 3)?;
                f.write_str(" && ")?;
                b.fmt_child(f, 4)
            }
            Guard::Or(a, b) => {
                a.fmt_child(f, 2)?;
                f.write_str(" || ")?;
                b.fmt_child(f, 3)
            }
            Guard::Implies(a, b) => {
                a.fmt_child(f, 2)?;
                f.write_str(" -> ")?;
                b.fmt_child(f, 1)
            }
        }
    }
}

/// Pairwise reduction: [a, b, c, d] becomes op(op(a, b), op(c, d)).
fn balanced(mut items: Vec<Guard>, unit: Guard, op: fn(Guard, Guard) -> Guard) -> Guard {
    if items.is_empty() {
        return unit;
    }
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => op(a, b),
                None => a,
            });
        }
        items = next;
    }
    items.pop().expect("non-empty")
}
