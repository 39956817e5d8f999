mod common;

use common::{assignments, truth};
use mdl_core::sat::Lit;
use mdl_core::text::parse_guard;
use mdl_core::{models_equivalent, BoolConstraintSet, Guard};

fn set(formulas: &[&str]) -> BoolConstraintSet {
    let mut s = BoolConstraintSet::new();
    for f in formulas {
        s.insert(parse_guard(f).unwrap());
    }
    s
}

fn models(s: &BoolConstraintSet) -> usize {
    let vars: Vec<String> = s.variables().iter().cloned().collect();
    assignments(&vars).iter().filter(|a| s.formulas().all(|g| truth(g, a))).count()
}

#[test]
fn cnf_examples() {
    let cnf = set(&["x"]).to_cnf();
    assert_eq!(cnf.clauses, vec![vec![Lit::new(0, true)]]);

    let cnf = set(&["!(x && y)"]).to_cnf();
    assert_eq!(cnf.num_vars, 2, "no auxiliaries");
    assert_eq!(cnf.clauses, vec![vec![Lit::new(0, false), Lit::new(1, false)]]);
}

#[test]
fn solve_examples() {
    assert_eq!(BoolConstraintSet::new().solve(None).unwrap().len(), 0);
    assert!(set(&["x", "!x"]).solve(None).is_none());

    let s = set(&["x -> y", "x"]);
    let m = s.solve(None).unwrap();
    assert!(m["y"]);
    assert!(s.formulas().all(|g| truth(g, &m)));
    assert_eq!(models(&s), 1);

    let s = set(&["!(x && y)", "x || y"]);
    let m = s.solve(None).unwrap();
    assert!(m["x"] ^ m["y"]);
    assert_eq!(models(&s), 2);
}

#[test]
fn models_agree_with_assumptions() {
    let s = set(&["x || y"]);
    let fix = [("x".to_string(), false)].into_iter().collect();
    let m = s.solve(Some(&fix)).unwrap();
    assert!(!m["x"] && m["y"]);
    let fix = [("x".to_string(), false), ("y".to_string(), false)].into_iter().collect();
    assert!(s.solve(Some(&fix)).is_none());
}

#[test]
fn equivalence_examples() {
    assert!(models_equivalent(&set(&["x -> y"]), &set(&["!x || y"])));
    assert!(!models_equivalent(&BoolConstraintSet::new(), &set(&["x"])));
    assert!(models_equivalent(&set(&["x", "y"]), &set(&["x && y"])));
    // an unconstrained extra variable does not matter
    assert!(models_equivalent(&set(&["x || !x"]), &BoolConstraintSet::new()));
}

#[test]
fn entailment() {
    let strong = set(&["x", "y"]);
    assert!(strong.entails(&set(&["x || y"])));
    assert!(!set(&["x || y"]).entails(&strong));
    let mut c = BoolConstraintSet::new();
    c.insert(Guard::Const(false));
    assert!(!c.is_satisfiable());
}
