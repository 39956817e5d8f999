//! Boolean side of the solver: guard formula sets, CNF encoding, a
//! deterministic DPLL core and DIMACS interchange.

mod cnf;
mod dimacs;
mod dpll;

use indexmap::IndexSet;

use crate::term::{BoolAssignment, Guard};

pub use cnf::{Cnf, Lit};
pub use dimacs::{parse_dimacs, write_dimacs, write_varmap, DimacsError};
pub use dpll::{solve_cnf, DpllStats};

/// Total assignment over a set's variable inventory.
pub type Model = BoolAssignment;

/// Conjunctive set of guard formulas, deduplicated after light normalization.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BoolConstraintSet {
    formulas: IndexSet<Guard>,
    vars: IndexSet<String>,
}

impl BoolConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Empty set whose inventory already lists `names`, fixing their indices.
    pub fn with_variables<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut s = Self::new();
        for n in names {
            s.vars.insert(n.into());
        }
        s
    }

    pub fn register_variable(&mut self, name: &str) {
        if !self.vars.contains(name) {
            self.vars.insert(name.to_string());
        }
    }

    /// Inserts `g`; returns `false` if an equal formula was already present.
    pub fn insert(&mut self, g: Guard) -> bool {
        let g = normalize(g);
        for v in g.variables() {
            self.register_variable(&v);
        }
        if g.is_true() {
            return false;
        }
        self.formulas.insert(g)
    }

    pub fn extend(&mut self, gs: impl IntoIterator<Item = Guard>) -> usize {
        gs.into_iter().filter(|g| self.insert(g.clone())).count()
    }

    pub fn contains(&self, g: &Guard) -> bool {
        self.formulas.contains(&normalize(g.clone()))
    }

    pub fn formulas(&self) -> impl ExactSizeIterator<Item = &Guard> {
        self.formulas.iter()
    }

    pub fn variables(&self) -> &IndexSet<String> {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn conjunction(&self) -> Guard {
        Guard::all(self.formulas.iter().cloned())
    }

    pub fn union(&self, other: &BoolConstraintSet) -> BoolConstraintSet {
        let mut out = self.clone();
        for v in &other.vars {
            out.register_variable(v);
        }
        for g in &other.formulas {
            out.formulas.insert(g.clone());
        }
        out
    }

    pub fn to_cnf(&self) -> Cnf {
        let mut b = cnf::CnfBuilder::new(&self.vars);
        for g in &self.formulas {
            b.add(g);
        }
        b.finish()
    }

    /// First model under the fixed branching order, or `None` if unsatisfiable.
    pub fn solve(&self, assumptions: Option<&BoolAssignment>) -> Option<Model> {
        self.solve_with_stats(assumptions).0
    }

    pub fn solve_with_stats(&self, assumptions: Option<&BoolAssignment>) -> (Option<Model>, DpllStats) {
        let mut b = cnf::CnfBuilder::new(&self.vars);
        if let Some(a) = assumptions {
            for name in a.keys() {
                b.register(&Guard::var(name.clone()));
            }
        }
        for g in &self.formulas {
            b.add(g);
        }
        let cnf = b.finish();
        let lits: Vec<Lit> = assumptions
            .into_iter()
            .flatten()
            .map(|(n, &v)| Lit::new(cnf.index_of(n).expect("registered"), v))
            .collect();
        let (model, stats) = solve_cnf(&cnf, &lits);
        let model = model.map(|m| {
            cnf.names
                .iter()
                .enumerate()
                .map(|(i, n)| (n.clone(), m[i]))
                .collect()
        });
        (model, stats)
    }

    pub fn is_satisfiable(&self) -> bool {
        self.solve(None).is_some()
    }

    /// True iff every model of `self` satisfies every formula of `other`.
    pub fn entails(&self, other: &BoolConstraintSet) -> bool {
        let extra: Vec<&Guard> = other.formulas.iter().filter(|g| !self.formulas.contains(*g)).collect();
        if extra.is_empty() {
            return true;
        }
        let mut probe = self.clone();
        for v in &other.vars {
            probe.register_variable(v);
        }
        probe.insert(Guard::not(Guard::all(extra.into_iter().cloned())));
        !probe.is_satisfiable()
    }
}

/// Identical model sets over the union inventory.
pub fn models_equivalent(s1: &BoolConstraintSet, s2: &BoolConstraintSet) -> bool {
    s1.entails(s2) && s2.entails(s1)
}

/// Flattens nested `&&`/`||`, sorts and deduplicates their operands, and
/// rebuilds them left-nested.
pub fn normalize(g: Guard) -> Guard {
    match g {
        Guard::And(..) => rebuild(flatten(g, true), Guard::and),
        Guard::Or(..) => rebuild(flatten(g, false), Guard::or),
        Guard::Not(inner) => Guard::not(normalize(*inner)),
        Guard::Implies(a, b) => Guard::implies(normalize(*a), normalize(*b)),
        g => g,
    }
}

fn flatten(g: Guard, conj: bool) -> Vec<Guard> {
    let mut out = Vec::new();
    let mut stack = vec![g];
    while let Some(g) = stack.pop() {
        match g {
            Guard::And(a, b) if conj => {
                stack.push(*b);
                stack.push(*a);
            }
            Guard::Or(a, b) if !conj => {
                stack.push(*b);
                stack.push(*a);
            }
            g => out.push(normalize(g)),
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Pairwise, so long operand lists stay shallow.
fn rebuild(mut items: Vec<Guard>, op: fn(Guard, Guard) -> Guard) -> Guard {
    while items.len() > 1 {
        let mut it = items.into_iter();
        let mut next = Vec::new();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => op(a, b),
                None => a,
            });
        }
        items = next;
    }
    items.pop().expect("flatten yields at least one operand")
}
