//! The approximating function and the ground fixed point.
//!
//! A slot is only ever lowered: down slots by meet, up slots by join, so a
//! constraint pass moves the vector down the refinement order. The vector is
//! threaded through the elements of a constraint and through the constraint
//! list, so later elements see the effect of earlier ones.

use crate::lattice::{glb, lub, strip_guards, vector_leq, ApproximationVector, LatticePoint};
use crate::sat::BoolConstraintSet;
use crate::term::{Collection, Element, TVar, Term, TermError, VariableInventory};

use super::{
    CellSnapshot, ConstraintSet, SeniorityConstraint, Solution, SolveError, SolveOptions,
    SolveReport, SolveStats, TraceStep, UnsatInfo, Verdict,
};

pub(crate) struct Engine<'a> {
    pub(crate) inv: &'a VariableInventory,
}

impl Engine<'_> {
    fn down_idx(&self, name: &str) -> Result<usize, SolveError> {
        self.inv
            .downvars
            .get_index_of(name)
            .ok_or_else(|| SolveError::UnknownVariable(TVar::down(name)))
    }

    fn up_idx(&self, name: &str) -> Result<usize, SolveError> {
        self.inv
            .upvars
            .get_index_of(name)
            .ok_or_else(|| SolveError::UnknownVariable(TVar::up(name)))
    }

    fn down_value<'v>(&self, name: &str, a: &'v ApproximationVector) -> Result<Option<&'v Term>, SolveError> {
        Ok(a.down[self.down_idx(name)?].value())
    }

    fn up_value<'v>(&self, name: &str, a: &'v ApproximationVector) -> Result<Option<&'v Term>, SolveError> {
        Ok(a.up[self.up_idx(name)?].value())
    }

    /// `t` with every t-variable replaced by its slot. `None` when a slot is a
    /// sentinel or a tail is bound to a non-collection.
    fn inst(&self, t: &Term, a: &ApproximationVector) -> Result<Option<Term>, SolveError> {
        Ok(match t {
            Term::Symbol(_) => Some(t.clone()),
            Term::Tuple(items) => {
                let mut out = Vec::with_capacity(items.len());
                for i in items {
                    let Some(x) = self.inst(i, a)? else { return Ok(None) };
                    out.push(x);
                }
                Some(Term::Tuple(out))
            }
            Term::Record(c) | Term::Choice(c) => {
                let record = matches!(t, Term::Record(_));
                let mut elements = Vec::with_capacity(c.elements.len());
                for e in &c.elements {
                    let Some(x) = self.inst(&e.term, a)? else { return Ok(None) };
                    elements.push(Element { label: e.label.clone(), guard: e.guard.clone(), term: x });
                }
                if let Some(tail) = &c.tail {
                    let value = if record { self.down_value(tail, a)? } else { self.up_value(tail, a)? };
                    match value {
                        Some(Term::Record(v)) if record => elements.extend(v.elements.iter().cloned()),
                        Some(Term::Choice(v)) if !record => elements.extend(v.elements.iter().cloned()),
                        _ => return Ok(None),
                    }
                }
                let c = Collection::new(elements);
                Some(if record { Term::Record(c) } else { Term::Choice(c) })
            }
            Term::DownVar(v) => self.down_value(v, a)?.cloned(),
            Term::UpVar(v) => self.up_value(v, a)?.cloned(),
            Term::Switch(_) => None,
        })
    }

    /// One constraint. Returns the updated vector (collapsed on failure).
    pub(crate) fn apply(
        &self,
        lhs: &Term,
        rhs: &Term,
        a: &ApproximationVector,
    ) -> Result<ApproximationVector, SolveError> {
        let mut a = a.clone();
        if a.is_collapsed() {
            return Ok(a);
        }
        // Both sides must be well formed once the current slots are spliced
        // in; slots only gain labels, so a collision here is permanent.
        for side in [lhs, rhs] {
            match self.inst(side, &a)? {
                Some(t) if !has_duplicates(&t) => {}
                _ => {
                    a.collapse();
                    return Ok(a);
                }
            }
        }
        self.go(lhs, rhs, &mut a)?;
        Ok(a)
    }

    fn go(&self, t1: &Term, t2: &Term, a: &mut ApproximationVector) -> Result<(), SolveError> {
        if a.is_collapsed() {
            return Ok(());
        }
        match (t1, t2) {
            (_, Term::DownVar(w)) => match self.down_value(w, a)?.cloned() {
                Some(r) => self.go(t1, &r, a),
                None => Ok(a.collapse()),
            },
            (Term::UpVar(u), _) => match self.up_value(u, a)?.cloned() {
                Some(l) => self.go(&l, t2, a),
                None => Ok(a.collapse()),
            },
            (Term::DownVar(v), _) => {
                let i = self.down_idx(v)?;
                let Some(t) = self.inst(t2, a)? else { return Ok(a.collapse()) };
                self.lower_down(i, &t, a);
                Ok(())
            }
            (_, Term::UpVar(w)) => {
                let i = self.up_idx(w)?;
                let Some(t) = self.inst(t1, a)? else { return Ok(a.collapse()) };
                self.raise_up(i, &t, a);
                Ok(())
            }
            (Term::Symbol(x), Term::Symbol(y)) => {
                if x != y {
                    a.collapse();
                }
                Ok(())
            }
            (Term::Tuple(xs), Term::Tuple(ys)) => {
                if xs.len() != ys.len() {
                    a.collapse();
                    return Ok(());
                }
                for (x, y) in xs.iter().zip(ys) {
                    self.go(x, y, a)?;
                }
                Ok(())
            }
            (Term::Record(r1), Term::Record(r2)) => {
                let Some(required) = self.expand_tail(r2, true, a)? else { return Ok(a.collapse()) };
                for (label, t2j) in &required {
                    if a.is_collapsed() {
                        break;
                    }
                    match r1.get(label) {
                        Some(e1) => self.go(&e1.term, t2j, a)?,
                        None => match &r1.tail {
                            Some(v) => {
                                let i = self.down_idx(v)?;
                                let Some(t) = self.inst(t2j, a)? else { return Ok(a.collapse()) };
                                let single = Term::record(vec![Element::new(label.clone(), t)]);
                                self.lower_down(i, &single, a);
                            }
                            None => a.collapse(),
                        },
                    }
                }
                Ok(())
            }
            (Term::Symbol(_) | Term::Tuple(_), Term::Record(r2)) => {
                match self.expand_tail(r2, true, a)? {
                    Some(req) if req.is_empty() => {}
                    _ => a.collapse(),
                }
                Ok(())
            }
            (Term::Choice(c1), Term::Choice(c2)) => {
                let Some(offered) = self.expand_tail(c1, false, a)? else { return Ok(a.collapse()) };
                for (label, t1i) in &offered {
                    if a.is_collapsed() {
                        break;
                    }
                    match c2.get(label) {
                        Some(e2) => self.go(t1i, &e2.term, a)?,
                        None => match &c2.tail {
                            Some(w) => {
                                let i = self.up_idx(w)?;
                                let Some(t) = self.inst(t1i, a)? else { return Ok(a.collapse()) };
                                let single = Term::choice(vec![Element::new(label.clone(), t)]);
                                self.raise_up(i, &single, a);
                            }
                            None => a.collapse(),
                        },
                    }
                }
                Ok(())
            }
            _ => Ok(a.collapse()),
        }
    }

    /// Explicit elements followed by the elements of the tail's slot.
    fn expand_tail(
        &self,
        c: &Collection,
        record: bool,
        a: &ApproximationVector,
    ) -> Result<Option<Vec<(String, Term)>>, SolveError> {
        let mut out: Vec<(String, Term)> =
            c.elements.iter().map(|e| (e.label.clone(), e.term.clone())).collect();
        if let Some(tail) = &c.tail {
            let value = if record { self.down_value(tail, a)? } else { self.up_value(tail, a)? };
            match value {
                Some(Term::Record(v)) if record => {
                    out.extend(v.elements.iter().map(|e| (e.label.clone(), e.term.clone())))
                }
                Some(Term::Choice(v)) if !record => {
                    out.extend(v.elements.iter().map(|e| (e.label.clone(), e.term.clone())))
                }
                _ => return Ok(None),
            }
        }
        Ok(Some(out))
    }

    fn lower_down(&self, i: usize, t: &Term, a: &mut ApproximationVector) {
        let new = match (&a.down[i], t.sort()) {
            (LatticePoint::Value(cur), Some(crate::term::Sort::Down)) => glb(cur, t),
            _ => None,
        };
        match new {
            Some(v) => a.down[i] = LatticePoint::Value(v),
            None => a.collapse(),
        }
    }

    fn raise_up(&self, i: usize, t: &Term, a: &mut ApproximationVector) {
        let new = match (&a.up[i], t) {
            (LatticePoint::Value(cur), Term::Choice(_)) => lub(cur, t),
            _ => None,
        };
        match new {
            Some(v) => a.up[i] = LatticePoint::Value(v),
            None => a.collapse(),
        }
    }

    /// Left-to-right pass over prepared constraints. Also returns the index
    /// of the constraint that collapsed the vector, if any.
    pub(crate) fn pass(
        &self,
        spec: &[(Term, Term)],
        a: &ApproximationVector,
    ) -> Result<(ApproximationVector, Option<usize>), SolveError> {
        let bound = depth_bound(spec);
        let mut cur = a.clone();
        for (i, (l, r)) in spec.iter().enumerate() {
            cur = self.apply(l, r, &cur)?;
            // A slot nested deeper than every term of the spec together can
            // only come from a variable bounded by a term containing itself;
            // the chain never ends and no finite term satisfies it.
            if !cur.is_collapsed() && cur.down.iter().chain(&cur.up).any(|p| p.value().is_some_and(|t| depth(t) > bound)) {
                cur.collapse();
            }
            if cur.is_collapsed() {
                return Ok((cur, Some(i)));
            }
        }
        Ok((cur, None))
    }
}

fn depth(t: &Term) -> usize {
    match t {
        Term::Symbol(_) | Term::DownVar(_) | Term::UpVar(_) => 1,
        Term::Tuple(items) => 1 + items.iter().map(depth).max().unwrap_or(0),
        Term::Record(c) | Term::Choice(c) => 1 + c.elements.iter().map(|e| depth(&e.term)).max().unwrap_or(0),
        Term::Switch(alts) => alts.iter().map(|a| depth(&a.term)).max().unwrap_or(0),
    }
}

fn depth_bound(spec: &[(Term, Term)]) -> usize {
    spec.iter().map(|(l, r)| depth(l) + depth(r)).sum::<usize>() + 1
}

/// Same label twice in one collection, at any depth.
pub(crate) fn has_duplicates(t: &Term) -> bool {
    match t {
        Term::Tuple(items) => items.iter().any(has_duplicates),
        Term::Record(c) | Term::Choice(c) => {
            let mut seen = std::collections::HashSet::new();
            !c.elements.iter().all(|e| seen.insert(e.label.as_str()))
                || c.elements.iter().any(|e| has_duplicates(&e.term))
        }
        Term::Switch(alts) => alts.iter().any(|a| has_duplicates(&a.term)),
        _ => false,
    }
}

/// Constant-guard term in guard-free canonical form, `Ok(None)` when it is
/// ill formed.
pub(crate) fn prepare(t: &Term) -> Result<Option<Term>, SolveError> {
    let c = match t.canonicalize(None) {
        Ok(c) => c,
        Err(TermError::IllFormedSwitch { .. }) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let Some(stripped) = strip_guards(&c) else {
        return Err(SolveError::NotGround(format!("symbolic guard in `{t}`")));
    };
    Ok((!has_duplicates(&stripped)).then_some(stripped))
}

fn prepare_constraint(c: &SeniorityConstraint) -> Result<Option<(Term, Term)>, SolveError> {
    Ok(match (prepare(&c.lhs)?, prepare(&c.rhs)?) {
        (Some(l), Some(r)) => Some((l, r)),
        _ => None,
    })
}

fn check_vector(inv: &VariableInventory, a: &ApproximationVector) -> Result<(), SolveError> {
    if a.down.len() != inv.downvars.len() || a.up.len() != inv.upvars.len() {
        return Err(crate::lattice::LatticeError::LengthMismatch {
            left: a.down.len() + a.up.len(),
            right: inv.downvars.len() + inv.upvars.len(),
        }
        .into());
    }
    Ok(())
}

/// The approximating function for one constraint whose guards are constant.
/// An ill-formed constraint collapses the vector.
pub fn af(
    c: &SeniorityConstraint,
    approx: &ApproximationVector,
    inv: &VariableInventory,
) -> Result<ApproximationVector, SolveError> {
    check_vector(inv, approx)?;
    c.check_sorts().map_err(|message| SolveError::Sort { constraint: 0, message })?;
    let eng = Engine { inv };
    match prepare_constraint(c)? {
        Some((l, r)) => eng.apply(&l, &r, approx),
        None => Ok(ApproximationVector::collapsed(approx.down.len(), approx.up.len())),
    }
}

/// Sequential composition of [`af`] over the constraint list.
pub fn af_c(
    cs: &ConstraintSet,
    approx: &ApproximationVector,
    inv: &VariableInventory,
) -> Result<ApproximationVector, SolveError> {
    check_vector(inv, approx)?;
    let mut cur = approx.clone();
    for (i, c) in cs.iter().enumerate() {
        c.check_sorts().map_err(|message| SolveError::Sort { constraint: i, message })?;
        cur = af(c, &cur, inv)?;
    }
    Ok(cur)
}

/// Ground fixed point: iterate the constraint pass from `((nil…), (none…))`
/// until nothing changes. Guards must be constant.
pub fn solve_ground(cs: &ConstraintSet, opts: &SolveOptions) -> Result<SolveReport, SolveError> {
    cs.validate()?;
    let inv = cs.inventory();
    if !inv.bvars.is_empty() {
        let names: Vec<&str> = inv.bvars.iter().map(String::as_str).collect();
        return Err(SolveError::NotGround(names.join(", ")));
    }
    let mut spec = Vec::with_capacity(cs.len());
    let unsat = |culprit: usize, iterations: usize, inv: VariableInventory| SolveReport {
        verdict: Verdict::Unsat(UnsatInfo { culprits: vec![culprit] }),
        stats: SolveStats { iterations, cells: 1, sat_calls: 0 },
        trace: Vec::new(),
        adjunct: BoolConstraintSet::new(),
        inventory: inv,
    };
    for (i, c) in cs.iter().enumerate() {
        match prepare_constraint(c)? {
            Some(p) => spec.push(p),
            None => return Ok(unsat(i, 0, inv)),
        }
    }
    let eng = Engine { inv: &inv };
    let mut cur = ApproximationVector::initial(inv.downvars.len(), inv.upvars.len());
    let mut trace = Vec::new();
    let mut iterations = 0;
    loop {
        iterations += 1;
        if iterations > opts.max_iters {
            return Err(SolveError::IterationLimitExceeded { limit: opts.max_iters });
        }
        let (next, culprit) = eng.pass(&spec, &cur)?;
        if !vector_leq(&next, &cur)? {
            return Err(SolveError::MonotonicityViolation { iteration: iterations });
        }
        if opts.trace {
            trace.push(TraceStep {
                iteration: iterations,
                cells: vec![CellSnapshot { cube: Default::default(), approx: next.clone() }],
                adjunct_size: 0,
            });
        }
        if let Some(i) = culprit {
            let mut r = unsat(i, iterations, inv);
            r.trace = trace;
            return Ok(r);
        }
        if next == cur {
            break;
        }
        cur = next;
    }
    let solution = Solution::from_vector(Default::default(), &inv, &cur);
    solution
        .audit(cs)
        .map_err(|(constraint, detail)| SolveError::VerificationFailure { constraint, detail })?;
    Ok(SolveReport {
        verdict: Verdict::Sat(solution),
        stats: SolveStats { iterations, cells: 1, sat_calls: 0 },
        trace,
        adjunct: BoolConstraintSet::new(),
        inventory: inv,
    })
}
