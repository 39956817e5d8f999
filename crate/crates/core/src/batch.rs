//! Many independent solves at once, and the exhaustive reference that tries
//! every Boolean assignment with the ground algorithm.

use crate::solver::{solve, solve_ground, ConstraintSet, SeniorityConstraint, SolveError, SolveOptions, SolveReport, Verdict};
use crate::term::{BoolAssignment, TermAssignment};

/// Solves each set independently; results are in input order.
pub fn solve_many(sets: &[ConstraintSet], opts: &SolveOptions) -> Vec<Result<SolveReport, SolveError>> {
    crate::par::map(sets, opts.parallel, |cs| solve(cs, opts))
}

/// All assignments to `vars`, in binary counting order with the first
/// variable as the most significant bit and `true` before `false`.
pub fn assignments(vars: &[String]) -> Vec<BoolAssignment> {
    let n = vars.len();
    (0..1u64 << n)
        .map(|k| {
            vars.iter()
                .enumerate()
                .map(|(i, v)| (v.clone(), (k >> (n - 1 - i)) & 1 == 0))
                .collect()
        })
        .collect()
}

/// `cs` with every b-variable replaced by its value.
pub fn instantiate(cs: &ConstraintSet, bvals: &BoolAssignment) -> Result<ConstraintSet, SolveError> {
    let none = TermAssignment::new();
    cs.iter()
        .map(|c| {
            Ok(SeniorityConstraint {
                lhs: c.lhs.substitute(bvals, &none)?,
                rhs: c.rhs.substitute(bvals, &none)?,
                origin: c.origin.clone(),
            })
        })
        .collect()
}

/// Outcome of the exhaustive reference for one constraint set.
#[derive(Debug, Clone)]
pub struct Enumeration {
    /// Ground verdict per assignment, in [`assignments`] order.
    pub cases: Vec<(BoolAssignment, Verdict)>,
}

impl Enumeration {
    pub fn is_sat(&self) -> bool {
        self.cases.iter().any(|(_, v)| v.is_sat())
    }

    pub fn first_sat(&self) -> Option<&(BoolAssignment, Verdict)> {
        self.cases.iter().find(|(_, v)| v.is_sat())
    }
}

/// Runs the ground algorithm once per Boolean assignment.
pub fn solve_by_enumeration(cs: &ConstraintSet, opts: &SolveOptions) -> Result<Enumeration, SolveError> {
    cs.validate()?;
    let vars: Vec<String> = cs.inventory().bvars.into_iter().collect();
    let all = assignments(&vars);
    let results = crate::par::map(&all, opts.parallel, |a| {
        let ground = instantiate(cs, a)?;
        solve_ground(&ground, opts).map(|r| (a.clone(), r.verdict))
    });
    Ok(Enumeration { cases: results.into_iter().collect::<Result<_, _>>()? })
}
