//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use mdl_core::lattice::is_senior;
use mdl_core::solver::{ConstraintSet, SeniorityConstraint};
use mdl_core::term::{Alternative, Collection, Element, Guard, TVar, Term, TermAssignment};
use mdl_core::BoolAssignment;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub const SYMBOLS: [&str; 3] = ["int", "str", "bool"];
pub const LABELS: [&str; 4] = ["a", "b", "c", "d"];

pub fn sym(s: &str) -> Term {
    Term::symbol(s)
}

pub fn rec(fields: &[(&str, Term)]) -> Term {
    Term::record(fields.iter().map(|(l, t)| Element::new(*l, t.clone())).collect())
}

pub fn cho(fields: &[(&str, Term)]) -> Term {
    Term::choice(fields.iter().map(|(l, t)| Element::new(*l, t.clone())).collect())
}

/// Every subset of `labels`, each present label carrying one of `payloads`.
fn collections(labels: &[&str], payloads: &[Term]) -> Vec<Vec<Element>> {
    let mut out = vec![Vec::new()];
    for l in labels {
        let mut next = Vec::new();
        for prefix in &out {
            next.push(prefix.clone());
            for p in payloads {
                let mut v = prefix.clone();
                v.push(Element::new(*l, p.clone()));
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Ground down-coerced terms of depth at most 2: two symbols, 1- and
/// 2-tuples, and records over three labels with payloads from
/// `{int, str, nil}`.
pub fn down_universe() -> Vec<Term> {
    let leaves = [sym("int"), sym("str"), Term::nil()];
    let mut out = vec![sym("int"), sym("str")];
    for a in &leaves {
        out.push(Term::Tuple(vec![a.clone()]));
        for b in &leaves {
            out.push(Term::Tuple(vec![a.clone(), b.clone()]));
        }
    }
    out.extend(collections(&["a", "b", "c"], &leaves).into_iter().map(Term::record));
    out
}

/// Choices over three labels with payloads from `{int, str, nil}`.
pub fn up_universe() -> Vec<Term> {
    let leaves = [sym("int"), sym("str"), Term::nil()];
    collections(&["a", "b", "c"], &leaves).into_iter().map(Term::choice).collect()
}

/// Smaller universes for exhaustive solution search.
pub fn small_down_universe() -> Vec<Term> {
    let leaves = [sym("int"), sym("str")];
    let mut out = vec![sym("int"), sym("str"), Term::Tuple(vec![sym("int")])];
    out.extend(collections(&["a", "b"], &leaves).into_iter().map(Term::record));
    out
}

pub fn small_up_universe() -> Vec<Term> {
    let leaves = [sym("int"), sym("str")];
    collections(&["a", "b"], &leaves).into_iter().map(Term::choice).collect()
}

/// Shape limits for random constraint sets.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub bvars: usize,
    pub downvars: usize,
    pub upvars: usize,
    pub depth: usize,
    pub constraints: usize,
    /// Allow `<g: t, …>` switches.
    pub switches: bool,
}

impl Shape {
    pub fn ground(downvars: usize, upvars: usize) -> Shape {
        Shape { bvars: 0, downvars, upvars, depth: 3, constraints: 3, switches: false }
    }
}

pub struct Gen<'a> {
    pub rng: &'a mut StdRng,
    pub shape: Shape,
}

impl Gen<'_> {
    fn bvar(&mut self) -> String {
        format!("x{}", self.rng.gen_range(0..self.shape.bvars))
    }

    pub fn guard(&mut self) -> Guard {
        if self.shape.bvars == 0 || self.rng.gen_bool(0.5) {
            return Guard::Const(true);
        }
        match self.rng.gen_range(0..6) {
            0 | 1 | 2 => Guard::var(self.bvar()),
            3 => Guard::not(Guard::var(self.bvar())),
            4 => Guard::and(Guard::var(self.bvar()), Guard::var(self.bvar())),
            _ => Guard::or(Guard::not(Guard::var(self.bvar())), Guard::var(self.bvar())),
        }
    }

    fn elements(&mut self, depth: usize) -> Vec<Element> {
        let n = self.rng.gen_range(0..=3);
        let mut labels: Vec<&str> = LABELS.to_vec();
        labels.shuffle(self.rng);
        (0..n)
            .map(|i| {
                // occasional duplicate labels exercise well-formedness
                let label = if i > 0 && self.rng.gen_bool(0.1) { labels[0] } else { labels[i] };
                let guard = self.guard();
                Element::guarded(label, guard, self.down(depth - 1))
            })
            .collect()
    }

    pub fn down(&mut self, depth: usize) -> Term {
        let leaf = depth <= 1;
        let var = self.shape.downvars > 0 && self.rng.gen_bool(if leaf { 0.3 } else { 0.15 });
        if var {
            return Term::down_var(format!("v{}", self.rng.gen_range(0..self.shape.downvars)));
        }
        if leaf {
            return if self.rng.gen_bool(0.2) { Term::nil() } else { sym(SYMBOLS.choose(self.rng).unwrap()) };
        }
        match self.rng.gen_range(0..10) {
            0 | 1 => sym(SYMBOLS.choose(self.rng).unwrap()),
            2 => {
                let n = self.rng.gen_range(1..=2);
                Term::Tuple((0..n).map(|_| self.down(depth - 1)).collect())
            }
            3 if self.shape.switches && self.shape.bvars > 0 => {
                let x = Guard::var(self.bvar());
                Term::Switch(vec![
                    Alternative { guard: x.clone(), term: self.down(depth - 1) },
                    Alternative { guard: Guard::not(x), term: self.down(depth - 1) },
                ])
            }
            _ => {
                let elements = self.elements(depth);
                let tail = (self.shape.downvars > 0 && self.rng.gen_bool(0.25))
                    .then(|| format!("v{}", self.rng.gen_range(0..self.shape.downvars)));
                Term::Record(Collection { elements, tail })
            }
        }
    }

    pub fn up(&mut self, depth: usize) -> Term {
        if self.shape.upvars > 0 && self.rng.gen_bool(0.25) {
            return Term::up_var(format!("u{}", self.rng.gen_range(0..self.shape.upvars)));
        }
        let elements = self.elements(depth.max(2));
        let tail = (self.shape.upvars > 0 && self.rng.gen_bool(0.3))
            .then(|| format!("u{}", self.rng.gen_range(0..self.shape.upvars)));
        Term::Choice(Collection { elements, tail })
    }

    pub fn constraint(&mut self) -> SeniorityConstraint {
        let depth = self.shape.depth;
        let up = self.shape.upvars > 0 && self.rng.gen_bool(0.35);
        let (l, r) = if up { (self.up(depth), self.up(depth)) } else { (self.down(depth), self.down(depth)) };
        SeniorityConstraint::new(l, r)
    }

    pub fn constraint_set(&mut self) -> ConstraintSet {
        let n = self.rng.gen_range(1..=self.shape.constraints);
        (0..n).map(|_| self.constraint()).collect()
    }
}

pub fn gen_set(rng: &mut StdRng, shape: Shape) -> ConstraintSet {
    Gen { rng, shape }.constraint_set()
}

/// Every assignment of `vars`.
pub fn assignments(vars: &[String]) -> Vec<BoolAssignment> {
    let mut out = vec![BoolAssignment::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|a| {
                [false, true].map(|b| {
                    let mut a = a.clone();
                    a.insert(v.clone(), b);
                    a
                })
            })
            .collect();
    }
    out
}

/// Truth-table evaluation written independently of `Guard::evaluate`.
pub fn truth(g: &Guard, a: &BoolAssignment) -> bool {
    match g {
        Guard::Const(b) => *b,
        Guard::Var(v) => a[v],
        Guard::Not(g) => !truth(g, a),
        Guard::And(x, y) => truth(x, a) && truth(y, a),
        Guard::Or(x, y) => truth(x, a) || truth(y, a),
        Guard::Implies(x, y) => !truth(x, a) || truth(y, a),
    }
}

/// Random guard over `x0..x{n-1}`.
pub fn random_guard(rng: &mut StdRng, n: usize, depth: usize) -> Guard {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.1) { Guard::Const(rng.gen()) } else { Guard::var(format!("x{}", rng.gen_range(0..n))) };
    }
    let a = random_guard(rng, n, depth - 1);
    match rng.gen_range(0..4) {
        0 => Guard::not(a),
        1 => Guard::and(a, random_guard(rng, n, depth - 1)),
        2 => Guard::or(a, random_guard(rng, n, depth - 1)),
        _ => Guard::implies(a, random_guard(rng, n, depth - 1)),
    }
}

/// Whether the ground assignment `tmap` satisfies every constraint.
pub fn satisfies(cs: &ConstraintSet, tmap: &TermAssignment) -> bool {
    let none = BoolAssignment::new();
    cs.iter().all(|c| {
        let l = c.lhs.substitute(&none, tmap).and_then(|t| t.canonicalize(None));
        let r = c.rhs.substitute(&none, tmap).and_then(|t| t.canonicalize(None));
        match (l, r) {
            (Ok(l), Ok(r)) => {
                l.is_well_formed().unwrap_or(false) && r.is_well_formed().unwrap_or(false) && is_senior(&l, &r)
            }
            _ => false,
        }
    })
}

/// All ground assignments of the constraint set's t-variables over the
/// given universes that satisfy every constraint.
pub fn brute_solutions(cs: &ConstraintSet, down: &[Term], up: &[Term]) -> Vec<TermAssignment> {
    let inv = cs.inventory();
    let vars: Vec<(TVar, &[Term])> = inv
        .downvars
        .iter()
        .map(|v| (TVar::down(v.clone()), down))
        .chain(inv.upvars.iter().map(|v| (TVar::up(v.clone()), up)))
        .collect();
    let mut out = Vec::new();
    let mut cur = TermAssignment::new();
    fn go(
        i: usize,
        vars: &[(TVar, &[Term])],
        cur: &mut TermAssignment,
        cs: &ConstraintSet,
        out: &mut Vec<TermAssignment>,
    ) {
        if i == vars.len() {
            if satisfies(cs, cur) {
                out.push(cur.clone());
            }
            return;
        }
        for t in vars[i].1 {
            cur.insert(vars[i].0.clone(), t.clone());
            go(i + 1, vars, cur, cs, out);
        }
    }
    go(0, &vars, &mut cur, cs, &mut out);
    out
}

/// Seniority on ground, guard-free canonical terms, written without reference
/// to the library's lattice code.
pub fn senior_oracle(a: &Term, b: &Term) -> bool {
    match (a, b) {
        (Term::Choice(c), Term::Choice(_)) if c.elements.is_empty() && c.tail.is_none() => true,
        (Term::Symbol(_) | Term::Tuple(_) | Term::Record(_), Term::Record(r)) if r.elements.is_empty() && r.tail.is_none() => {
            true
        }
        (Term::Symbol(x), Term::Symbol(y)) => x == y,
        (Term::Tuple(xs), Term::Tuple(ys)) => xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| senior_oracle(x, y)),
        (Term::Record(r1), Term::Record(r2)) => r2
            .elements
            .iter()
            .all(|e2| r1.elements.iter().any(|e1| e1.label == e2.label && senior_oracle(&e1.term, &e2.term))),
        (Term::Choice(c1), Term::Choice(c2)) => c1
            .elements
            .iter()
            .all(|e1| c2.elements.iter().any(|e2| e1.label == e2.label && senior_oracle(&e1.term, &e2.term))),
        _ => false,
    }
}

/// The element of `pool` below both inputs and above every other such
/// element, if unique.
pub fn greatest_lower_bound(pool: &[Term], x: &Term, y: &Term) -> Option<Term> {
    let lower: Vec<&Term> = pool.iter().filter(|c| senior_oracle(c, x) && senior_oracle(c, y)).collect();
    let top: Vec<&Term> = lower.iter().copied().filter(|g| lower.iter().all(|c| senior_oracle(c, g))).collect();
    (top.len() == 1).then(|| top[0].clone())
}

pub fn least_upper_bound(pool: &[Term], x: &Term, y: &Term) -> Option<Term> {
    let upper: Vec<&Term> = pool.iter().filter(|c| senior_oracle(x, c) && senior_oracle(y, c)).collect();
    let bottom: Vec<&Term> = upper.iter().copied().filter(|g| upper.iter().all(|c| senior_oracle(g, c))).collect();
    (bottom.len() == 1).then(|| bottom[0].clone())
}

/// Whether a down variable occurs inside a choice, where choice joins
/// combine it with the opposite operation.
pub fn mixed_variance(t: &Term) -> bool {
    fn under_choice(t: &Term, inside: bool) -> bool {
        match t {
            Term::DownVar(_) => inside,
            Term::Tuple(items) => items.iter().any(|i| under_choice(i, inside)),
            Term::Record(c) => (inside && c.tail.is_some()) || c.elements.iter().any(|e| under_choice(&e.term, inside)),
            Term::Choice(c) => c.elements.iter().any(|e| under_choice(&e.term, true)),
            Term::Switch(alts) => alts.iter().any(|a| under_choice(&a.term, inside)),
            _ => false,
        }
    }
    under_choice(t, false)
}

pub fn set_has_mixed_variance(cs: &ConstraintSet) -> bool {
    cs.iter().any(|c| mixed_variance(&c.lhs) || mixed_variance(&c.rhs))
}
