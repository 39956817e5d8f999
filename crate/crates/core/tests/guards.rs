use mdl_core::guards::{sc, wfc, GeneratedConstraints, Rule};
use mdl_core::text::parse_guard;
use mdl_core::{models_equivalent, parse_term, BoolConstraintSet, Guard, Term};

fn t(src: &str) -> Term {
    parse_term(src).unwrap()
}

fn set(gs: impl IntoIterator<Item = Guard>) -> BoolConstraintSet {
    let mut s = BoolConstraintSet::new();
    s.extend(gs);
    s
}

fn parsed(fs: &[&str]) -> BoolConstraintSet {
    set(fs.iter().map(|f| parse_guard(f).unwrap()))
}

#[test]
fn wfc_examples() {
    assert!(wfc(&t("int")).is_empty());
    assert!(models_equivalent(&set(wfc(&t("{ a(x): int, a(y): str }"))), &parsed(&["!(x && y)"])));
    assert!(models_equivalent(&set(wfc(&t("< x: int, y: str >"))), &parsed(&["!(x && y)", "x || y"])));
    // distinct labels impose nothing
    assert!(models_equivalent(&set(wfc(&t("{ a(x): int, b(y): str }"))), &BoolConstraintSet::new()));
}

#[test]
fn sc_examples() {
    assert!(sc(&t("int"), &t("int")).is_empty());
    assert!(models_equivalent(&set(sc(&t("{}"), &t("{ b(w): int }"))), &parsed(&["!w"])));
    assert!(!set(sc(&t("int"), &t("str"))).is_satisfiable());

    // Alice may only suggest if the Seller listens
    let alice = t("(: suggest(y): { title: string } :)");
    let seller = t("(: request: { title: string }, payment: { title: string, money: int } :)");
    let got = set(sc(&alice, &seller));
    assert!(got.entails(&parsed(&["!y"])));
    assert!(got.is_satisfiable());
}

#[test]
fn provenance_is_recorded() {
    let mut g = GeneratedConstraints::default();
    g.add_wfc(&t("{ a(x): int, a(y): str }"), Some(3));
    g.add_sc(&t("{}"), &t("{ b(w): int }"), Some(4));
    assert_eq!(g.len(), 2);
    let rules: Vec<(Rule, Option<usize>)> = g.formulas.values().map(|p| (p.rule, p.source)).collect();
    assert_eq!(rules[0], (Rule::WfcDuplicate, Some(3)));
    assert_eq!(rules[1].1, Some(4));
    // duplicates keep their first provenance
    g.add_wfc(&t("{ a(x): int, a(y): str }"), Some(9));
    assert_eq!(g.len(), 2);
}
