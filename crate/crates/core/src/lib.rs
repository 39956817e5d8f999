//! MDL term algebra and the seniority-constraint solver.
//!
//! Terms describe message formats; a constraint `t1 <= t2` asks for `t1` to
//! be junior to `t2`. [`solver::solve`] finds Boolean values for the guards
//! and ground terms for the t-variables, or reports that none exist.

pub mod batch;
pub mod chor;
pub mod guards;
pub mod lattice;
mod par;
pub mod sat;
pub mod solver;
pub mod term;
pub mod text;

pub use chor::{ConfigurationReport, ServiceGraph};
pub use lattice::{is_senior, join, meet, ApproximationVector, LatticePoint};
pub use sat::{models_equivalent, BoolConstraintSet, Model};
pub use solver::{solve, solve_ground, ConstraintSet, SeniorityConstraint, Solution, SolveOptions, Verdict};
pub use term::{BoolAssignment, Element, Guard, Term, VariableInventory};
pub use text::{parse_chor, parse_constraints, parse_term, print_term};
