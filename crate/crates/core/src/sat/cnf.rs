use std::fmt;

use indexmap::IndexMap;

use crate::term::Guard;

/// A literal: variable index (0-based) with polarity packed into the low bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: usize, positive: bool) -> Lit {
        Lit(((var as u32) << 1) | u32::from(!positive))
    }

    #[inline]
    pub fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    #[inline]
    pub(crate) fn code(self) -> usize {
        self.0 as usize
    }

    /// 1-indexed signed DIMACS form.
    pub fn to_dimacs(self) -> i64 {
        let v = self.var() as i64 + 1;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    pub fn from_dimacs(x: i64) -> Lit {
        debug_assert!(x != 0);
        Lit::new(x.unsigned_abs() as usize - 1, x > 0)
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;

    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// Clause list over numbered variables. The first `names.len()` variables
/// are the named b-variables; the rest are auxiliaries of the encoding.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<Lit>>,
    pub names: Vec<String>,
}

impl Cnf {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Negation normal form with constants folded away (except at the root).
#[derive(Debug, Clone)]
enum Nnf {
    Const(bool),
    Lit(Lit),
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
}

pub(crate) struct CnfBuilder {
    vars: IndexMap<String, usize>,
    aux: usize,
    clauses: Vec<Vec<Lit>>,
}

impl CnfBuilder {
    pub(crate) fn new<'a>(names: impl IntoIterator<Item = &'a String>) -> Self {
        let vars = names.into_iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        CnfBuilder { vars, aux: 0, clauses: Vec::new() }
    }

    fn var(&mut self, name: &str) -> usize {
        let next = self.vars.len();
        *self.vars.entry(name.to_string()).or_insert(next)
    }

    /// Registers the variables of `g` without adding clauses, so that named
    /// variables precede every auxiliary.
    pub(crate) fn register(&mut self, g: &Guard) {
        for v in g.variables() {
            self.var(&v);
        }
    }

    fn nnf(&mut self, g: &Guard, positive: bool) -> Nnf {
        match g {
            Guard::Const(b) => Nnf::Const(*b == positive),
            Guard::Var(v) => Nnf::Lit(Lit::new(self.var(v), positive)),
            Guard::Not(inner) => self.nnf(inner, !positive),
            Guard::And(a, b) if positive => conj(self.nnf(a, true), self.nnf(b, true)),
            Guard::And(a, b) => disj(self.nnf(a, false), self.nnf(b, false)),
            Guard::Or(a, b) if positive => disj(self.nnf(a, true), self.nnf(b, true)),
            Guard::Or(a, b) => conj(self.nnf(a, false), self.nnf(b, false)),
            Guard::Implies(a, b) if positive => disj(self.nnf(a, false), self.nnf(b, true)),
            Guard::Implies(a, b) => conj(self.nnf(a, true), self.nnf(b, false)),
        }
    }

    /// Asserts `g`.
    pub(crate) fn add(&mut self, g: &Guard) {
        let n = self.nnf(g, true);
        self.assert_nnf(n);
    }

    fn assert_nnf(&mut self, n: Nnf) {
        match n {
            Nnf::Const(true) => {}
            Nnf::Const(false) => self.clauses.push(Vec::new()),
            Nnf::Lit(l) => self.clauses.push(vec![l]),
            Nnf::And(items) => items.into_iter().for_each(|i| self.assert_nnf(i)),
            Nnf::Or(items) => {
                let clause = items.into_iter().map(|i| self.literal_for(i)).collect();
                self.clauses.push(clause);
            }
        }
    }

    /// A literal that implies `n` (positive-polarity definition). Constants
    /// never reach here because `conj`/`disj` fold them.
    fn literal_for(&mut self, n: Nnf) -> Lit {
        match n {
            Nnf::Lit(l) => l,
            Nnf::Const(_) => unreachable!("constants are folded before clausification"),
            Nnf::And(items) => {
                let d = self.fresh();
                for i in items {
                    let l = self.literal_for(i);
                    self.clauses.push(vec![!d, l]);
                }
                d
            }
            Nnf::Or(items) => {
                let d = self.fresh();
                let mut clause = vec![!d];
                for i in items {
                    clause.push(self.literal_for(i));
                }
                self.clauses.push(clause);
                d
            }
        }
    }

    fn fresh(&mut self) -> Lit {
        self.aux += 1;
        // Auxiliaries are numbered after the named variables once building
        // finishes; encode them provisionally with a large offset.
        Lit::new(AUX_BASE + self.aux - 1, true)
    }

    pub(crate) fn finish(self) -> Cnf {
        let named = self.vars.len();
        let remap = |l: Lit| {
            if l.var() >= AUX_BASE {
                Lit::new(named + l.var() - AUX_BASE, l.is_positive())
            } else {
                l
            }
        };
        let clauses = self
            .clauses
            .into_iter()
            .filter_map(|c| {
                // drop repeated literals and clauses that mention x and !x
                let mut out: Vec<Lit> = Vec::with_capacity(c.len());
                for l in c.into_iter().map(remap) {
                    if out.contains(&!l) {
                        return None;
                    }
                    if !out.contains(&l) {
                        out.push(l);
                    }
                }
                Some(out)
            })
            .collect();
        Cnf { num_vars: named + self.aux, clauses, names: self.vars.into_keys().collect() }
    }
}

const AUX_BASE: usize = 1 << 30;

fn conj(a: Nnf, b: Nnf) -> Nnf {
    match (a, b) {
        (Nnf::Const(false), _) | (_, Nnf::Const(false)) => Nnf::Const(false),
        (Nnf::Const(true), x) | (x, Nnf::Const(true)) => x,
        (Nnf::And(mut xs), Nnf::And(ys)) => {
            xs.extend(ys);
            Nnf::And(xs)
        }
        (Nnf::And(mut xs), y) => {
            xs.push(y);
            Nnf::And(xs)
        }
        (x, Nnf::And(mut ys)) => {
            ys.insert(0, x);
            Nnf::And(ys)
        }
        (x, y) => Nnf::And(vec![x, y]),
    }
}

fn disj(a: Nnf, b: Nnf) -> Nnf {
    match (a, b) {
        (Nnf::Const(true), _) | (_, Nnf::Const(true)) => Nnf::Const(true),
        (Nnf::Const(false), x) | (x, Nnf::Const(false)) => x,
        (Nnf::Or(mut xs), Nnf::Or(ys)) => {
            xs.extend(ys);
            Nnf::Or(xs)
        }
        (Nnf::Or(mut xs), y) => {
            xs.push(y);
            Nnf::Or(xs)
        }
        (x, Nnf::Or(mut ys)) => {
            ys.insert(0, x);
            Nnf::Or(ys)
        }
        (x, y) => Nnf::Or(vec![x, y]),
    }
}
