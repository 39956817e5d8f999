//! The full procedure for guarded constraints.
//!
//! Guards split the Boolean space into cells: partial assignments (cubes)
//! under which every guard of the constraint set is constant. Each cell
//! carries its own ground approximation and is advanced by the ground
//! constraint pass. Cells that collapse, or whose instance is ill formed,
//! contribute the negation of their cube to the adjunct set B. Once no
//! approximation moves, the well-formedness and seniority conditions of the
//! constraints, instantiated with the cell-wise approximation written as a
//! switch over cubes, are added to B; the loop stops when that addition is
//! already entailed.

use indexmap::IndexSet;

use crate::guards::GeneratedConstraints;
use crate::lattice::{vector_leq, ApproximationVector, LatticePoint};
use crate::sat::BoolConstraintSet;
use crate::term::{
    Alternative, BoolAssignment, Guard, Sort, TVar, Term, TermAssignment, TermError,
    VariableInventory,
};

use super::af::{has_duplicates, Engine};
use super::{
    CellSnapshot, ConstraintSet, Solution, SolveError, SolveOptions, SolveReport, SolveStats,
    TraceStep, UnsatInfo, Verdict,
};

struct Cell {
    cube: BoolAssignment,
    spec: Vec<(Term, Term)>,
    approx: ApproximationVector,
}

enum Specialized {
    Ready(Vec<(Term, Term)>),
    Split(String),
    Dead(usize),
}

/// Conjunction of the cube's literals in inventory order.
fn cube_guard(cube: &BoolAssignment, order: &IndexSet<String>) -> Guard {
    Guard::all(order.iter().filter_map(|v| {
        cube.get(v).map(|&b| if b { Guard::var(v.clone()) } else { Guard::not(Guard::var(v.clone())) })
    }))
}

/// First symbolic guard in preorder.
fn open_guard(t: &Term) -> Option<&Guard> {
    match t {
        Term::Tuple(items) => items.iter().find_map(open_guard),
        Term::Record(c) | Term::Choice(c) => c.elements.iter().find_map(|e| {
            if e.guard.constant_value().is_none() {
                Some(&e.guard)
            } else {
                open_guard(&e.term)
            }
        }),
        Term::Switch(alts) => alts.iter().find_map(|a| {
            if a.guard.constant_value().is_none() {
                Some(&a.guard)
            } else {
                open_guard(&a.term)
            }
        }),
        _ => None,
    }
}

fn specialize(cs: &ConstraintSet, cube: &BoolAssignment, order: &IndexSet<String>) -> Result<Specialized, SolveError> {
    let mut spec = Vec::with_capacity(cs.len());
    let mut split: Option<String> = None;
    for (i, c) in cs.iter().enumerate() {
        let mut sides = Vec::with_capacity(2);
        for t in [&c.lhs, &c.rhs] {
            let canon = match t.canonicalize(Some(cube)) {
                Ok(x) => x,
                Err(TermError::IllFormedSwitch { .. }) => return Ok(Specialized::Dead(i)),
                Err(e) => return Err(e.into()),
            };
            if let Some(g) = open_guard(&canon) {
                if split.is_none() {
                    let vars = g.variables();
                    let pick = order
                        .iter()
                        .find(|v| vars.contains(*v) && !cube.contains_key(*v))
                        .cloned()
                        .ok_or_else(|| SolveError::Internal(format!("guard `{g}` has no open variable")))?;
                    split = Some(pick);
                }
                continue;
            }
            let stripped = crate::lattice::strip_guards(&canon)
                .ok_or_else(|| SolveError::Internal("guards left after specialization".into()))?;
            if has_duplicates(&stripped) {
                return Ok(Specialized::Dead(i));
            }
            sides.push(stripped);
        }
        if let (Some(r), Some(l)) = (sides.pop(), sides.pop()) {
            spec.push((l, r));
        }
    }
    Ok(match split {
        Some(v) => Specialized::Split(v),
        None => Specialized::Ready(spec),
    })
}

fn initial_cells(
    cs: &ConstraintSet,
    inv: &VariableInventory,
) -> Result<(Vec<Cell>, Vec<(BoolAssignment, usize)>), SolveError> {
    let mut live = Vec::new();
    let mut dead = Vec::new();
    let mut stack = vec![BoolAssignment::new()];
    while let Some(cube) = stack.pop() {
        match specialize(cs, &cube, &inv.bvars)? {
            Specialized::Ready(spec) => live.push(Cell {
                cube,
                spec,
                approx: ApproximationVector::initial(inv.downvars.len(), inv.upvars.len()),
            }),
            Specialized::Dead(i) => dead.push((cube, i)),
            Specialized::Split(v) => {
                let mut f = cube.clone();
                f.insert(v.clone(), false);
                let mut t = cube;
                t.insert(v, true);
                stack.push(f);
                stack.push(t);
            }
        }
    }
    Ok((live, dead))
}

/// The per-cell approximation as one term per slot: the common value, or a
/// switch over the cubes of the live cells.
fn switch_assignment(cells: &[Cell], inv: &VariableInventory) -> TermAssignment {
    let mut m = TermAssignment::new();
    let mut slot = |var: TVar, pick: &dyn Fn(&Cell) -> &LatticePoint| {
        let values: Vec<(&Cell, &Term)> = cells
            .iter()
            .map(|c| (c, pick(c).value().expect("live cell")))
            .collect();
        let first = values[0].1;
        let term = if values.iter().all(|(_, t)| *t == first) {
            first.clone()
        } else {
            Term::Switch(
                values
                    .iter()
                    .map(|(c, t)| Alternative { guard: cube_guard(&c.cube, &inv.bvars), term: (*t).clone() })
                    .collect(),
            )
        };
        m.insert(var, term);
    };
    for (i, name) in inv.downvars.iter().enumerate() {
        slot(TVar { sort: Sort::Down, name: name.clone() }, &|c: &Cell| &c.approx.down[i]);
    }
    for (i, name) in inv.upvars.iter().enumerate() {
        slot(TVar { sort: Sort::Up, name: name.clone() }, &|c: &Cell| &c.approx.up[i]);
    }
    m
}

fn generate(cs: &ConstraintSet, cells: &[Cell], inv: &VariableInventory) -> Result<GeneratedConstraints, SolveError> {
    let mut gen = GeneratedConstraints::default();
    if cells.is_empty() {
        return Ok(gen);
    }
    let tmap = switch_assignment(cells, inv);
    let none = BoolAssignment::new();
    for (i, c) in cs.iter().enumerate() {
        match (c.lhs.substitute(&none, &tmap), c.rhs.substitute(&none, &tmap)) {
            (Ok(l), Ok(r)) => {
                gen.add_wfc(&l, Some(i));
                gen.add_wfc(&r, Some(i));
                gen.add_sc(&l, &r, Some(i));
            }
            // A tail bound to a non-collection in some cell; that cell may
            // still drop the element holding it, so go cell by cell.
            (Err(TermError::TailNotCollection { .. }), _) | (_, Err(TermError::TailNotCollection { .. })) => {
                per_cell(&mut gen, c.lhs.clone(), c.rhs.clone(), i, cells, inv)?
            }
            (Err(e), _) | (_, Err(e)) => return Err(e.into()),
        }
    }
    Ok(gen)
}

fn per_cell(
    gen: &mut GeneratedConstraints,
    lhs: Term,
    rhs: Term,
    i: usize,
    cells: &[Cell],
    inv: &VariableInventory,
) -> Result<(), SolveError> {
    for cell in cells {
        let cube = cube_guard(&cell.cube, &inv.bvars);
        let tmap = Solution::from_vector(cell.cube.clone(), inv, &cell.approx).term_assignment();
        let inst = |t: &Term| t.canonicalize(Some(&cell.cube))?.substitute(&cell.cube, &tmap);
        let mut local = GeneratedConstraints::default();
        match (inst(&lhs), inst(&rhs)) {
            (Ok(l), Ok(r)) => {
                local.add_wfc(&l, Some(i));
                local.add_wfc(&r, Some(i));
                local.add_sc(&l, &r, Some(i));
                for (g, prov) in local.formulas {
                    gen.formulas.entry(Guard::implies_simplified(cube.clone(), g)).or_insert(prov);
                }
            }
            (Err(TermError::TailNotCollection { .. }), _) | (_, Err(TermError::TailNotCollection { .. })) => {
                let prov = crate::guards::Provenance { source: Some(i), rule: crate::guards::Rule::WfcTailKind, path: String::new() };
                gen.formulas.entry(Guard::not_simplified(cube.clone())).or_insert(prov);
            }
            (Err(e), _) | (_, Err(e)) => return Err(e.into()),
        }
    }
    Ok(())
}

fn agrees(cube: &BoolAssignment, model: &BoolAssignment) -> bool {
    cube.iter().all(|(k, v)| model.get(k) == Some(v))
}

/// Solves a constraint set with guards.
pub fn solve(cs: &ConstraintSet, opts: &SolveOptions) -> Result<SolveReport, SolveError> {
    cs.validate()?;
    let inv = cs.inventory();
    let eng = Engine { inv: &inv };
    let mut b = BoolConstraintSet::with_variables(inv.bvars.iter().cloned());
    let mut culprits: IndexSet<usize> = IndexSet::new();
    let mut stats = SolveStats::default();
    let mut trace = Vec::new();

    let (mut cells, dead) = initial_cells(cs, &inv)?;
    stats.cells = cells.len() + dead.len();
    for (cube, i) in dead {
        b.insert(Guard::not_simplified(cube_guard(&cube, &inv.bvars)));
        culprits.insert(i);
    }

    loop {
        stats.iterations += 1;
        if stats.iterations > opts.max_iters {
            return Err(SolveError::IterationLimitExceeded { limit: opts.max_iters });
        }
        let results = crate::par::map(&cells, opts.parallel, |c| eng.pass(&c.spec, &c.approx));
        let mut changed = false;
        let mut next = Vec::with_capacity(cells.len());
        for (cell, res) in cells.into_iter().zip(results) {
            let (v, culprit) = res?;
            if !vector_leq(&v, &cell.approx)? {
                return Err(SolveError::MonotonicityViolation { iteration: stats.iterations });
            }
            if v != cell.approx {
                changed = true;
            }
            if v.is_collapsed() {
                b.insert(Guard::not_simplified(cube_guard(&cell.cube, &inv.bvars)));
                if let Some(i) = culprit {
                    culprits.insert(i);
                }
                continue;
            }
            next.push(Cell { approx: v, ..cell });
        }
        cells = next;

        let mut stop = false;
        if !changed {
            // Conditions generated from a moving approximation could exclude
            // cases that a later iteration would repair, so they are only
            // added once the approximation is stable.
            let gen = generate(cs, &cells, &inv)?;
            let mut extended = b.clone();
            extended.extend(gen.guards().cloned());
            if extended.len() != b.len() {
                stats.sat_calls += 1;
            }
            stop = b.entails(&extended);
            b = extended;
            if !stop {
                let before = cells.len();
                cells.retain(|c| b.solve(Some(&c.cube)).is_some());
                stats.sat_calls += before;
            }
        }
        if opts.trace {
            trace.push(TraceStep {
                iteration: stats.iterations,
                cells: cells
                    .iter()
                    .map(|c| CellSnapshot { cube: c.cube.clone(), approx: c.approx.clone() })
                    .collect(),
                adjunct_size: b.len(),
            });
        }
        if stop || cells.is_empty() {
            break;
        }
    }

    stats.sat_calls += 1;
    let verdict = match b.solve(None) {
        None => Verdict::Unsat(UnsatInfo { culprits: culprits.into_iter().collect() }),
        Some(model) => {
            let cell = cells
                .iter()
                .find(|c| agrees(&c.cube, &model))
                .ok_or_else(|| SolveError::Internal("model outside every live case".into()))?;
            let solution = Solution::from_vector(model, &inv, &cell.approx);
            solution
                .audit(cs)
                .map_err(|(constraint, detail)| SolveError::VerificationFailure { constraint, detail })?;
            Verdict::Sat(solution)
        }
    };
    Ok(SolveReport { verdict, stats, trace, adjunct: b, inventory: inv })
}
