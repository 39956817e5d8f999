//! Boolean side conditions for semi-ground terms: well-formedness (WFC) and
//! seniority (SC). Each formula carries the rule and term position that
//! produced it.

use std::fmt;

use indexmap::IndexMap;

use crate::sat::BoolConstraintSet;
use crate::term::{Collection, Guard, Term};

/// Generating rule, numbered after the items of the two rule lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// Duplicate labels in a collection.
    WfcDuplicate,
    /// Mutual exclusion of two switch alternatives.
    WfcSwitchExclusive,
    /// At least one switch alternative holds.
    WfcSwitchCover,
    /// A tail variable bound to something other than a collection.
    WfcTailKind,
    /// Cross-category or unequal-symbol pair.
    ScFalse,
    /// Record element on the right with no matching label on the left.
    ScRecordMissing,
    /// Matching left element must be present when the right one is.
    ScRecordPresence,
    /// Choice element on the left with no matching label on the right.
    ScChoiceMissing,
    ScChoicePresence,
    /// Non-record junior to a record: every right element must be absent.
    ScNilOnly,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::WfcDuplicate => "wfc:duplicate-label",
            Rule::WfcSwitchExclusive => "wfc:switch-exclusive",
            Rule::WfcSwitchCover => "wfc:switch-cover",
            Rule::WfcTailKind => "wfc:tail-kind",
            Rule::ScFalse => "sc:incompatible",
            Rule::ScRecordMissing => "sc:record-missing-label",
            Rule::ScRecordPresence => "sc:record-presence",
            Rule::ScChoiceMissing => "sc:choice-missing-label",
            Rule::ScChoicePresence => "sc:choice-presence",
            Rule::ScNilOnly => "sc:junior-to-empty-record",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    /// Index of the source constraint, when generated for a constraint set.
    pub source: Option<usize>,
    pub rule: Rule,
    /// Dotted position: labels for collection elements, `#i` for tuple items
    /// and switch alternatives.
    pub path: String,
}

/// Deduplicated formulas with the provenance of their first occurrence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GeneratedConstraints {
    pub formulas: IndexMap<Guard, Provenance>,
}

impl GeneratedConstraints {
    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn guards(&self) -> impl Iterator<Item = &Guard> {
        self.formulas.keys()
    }

    pub fn add_wfc(&mut self, t: &Term, source: Option<usize>) {
        let mut out = Vec::new();
        wfc_into(t, "", &mut out);
        self.absorb(out, source);
    }

    pub fn add_sc(&mut self, t1: &Term, t2: &Term, source: Option<usize>) {
        let mut out = Vec::new();
        sc_into(t1, t2, "", &mut out);
        self.absorb(out, source);
    }

    fn absorb(&mut self, items: Vec<(Guard, Rule, String)>, source: Option<usize>) {
        for (g, rule, path) in items {
            self.formulas.entry(g).or_insert(Provenance { source, rule, path });
        }
    }

    pub fn to_set(&self) -> BoolConstraintSet {
        let mut s = BoolConstraintSet::new();
        s.extend(self.formulas.keys().cloned());
        s
    }
}

/// Formulas that hold exactly when `t` is well formed.
pub fn wfc(t: &Term) -> Vec<Guard> {
    let mut out = Vec::new();
    wfc_into(t, "", &mut out);
    dedup(out)
}

/// Formulas that, together with the WFC of both sides, hold exactly when
/// `t1 ⊑ t2`.
pub fn sc(t1: &Term, t2: &Term) -> Vec<Guard> {
    let mut out = Vec::new();
    sc_into(t1, t2, "", &mut out);
    dedup(out)
}

fn dedup(items: Vec<(Guard, Rule, String)>) -> Vec<Guard> {
    let mut seen = indexmap::IndexSet::new();
    for (g, _, _) in items {
        seen.insert(g);
    }
    seen.into_iter().collect()
}

type Out = Vec<(Guard, Rule, String)>;

fn push(out: &mut Out, g: Guard, rule: Rule, path: &str) {
    if !g.is_true() {
        out.push((g, rule, path.to_string()));
    }
}

fn child(path: &str, step: &str) -> String {
    if path.is_empty() {
        step.to_string()
    } else {
        format!("{path}.{step}")
    }
}

/// Runs `f` into a scratch buffer and re-emits its formulas under `premise`.
fn guarded(premise: &Guard, out: &mut Out, f: impl FnOnce(&mut Out)) {
    let mut inner = Vec::new();
    f(&mut inner);
    for (g, rule, path) in inner {
        push(out, Guard::implies_simplified(premise.clone(), g), rule, &path);
    }
}

fn wfc_into(t: &Term, path: &str, out: &mut Out) {
    match t {
        Term::Symbol(_) | Term::DownVar(_) | Term::UpVar(_) => {}
        Term::Tuple(items) => {
            for (i, item) in items.iter().enumerate() {
                wfc_into(item, &child(path, &format!("#{i}")), out);
            }
        }
        Term::Record(c) | Term::Choice(c) => {
            let es = &c.elements;
            for i in 0..es.len() {
                for j in i + 1..es.len() {
                    if es[i].label == es[j].label {
                        let g = Guard::not_simplified(Guard::and_simplified(
                            es[i].guard.clone(),
                            es[j].guard.clone(),
                        ));
                        push(out, g, Rule::WfcDuplicate, &child(path, &es[i].label));
                    }
                }
            }
            for e in es {
                guarded(&e.guard, out, |o| wfc_into(&e.term, &child(path, &e.label), o));
            }
        }
        Term::Switch(alts) => {
            for i in 0..alts.len() {
                for j in i + 1..alts.len() {
                    if contradictory_cubes(&alts[i].guard, &alts[j].guard) {
                        continue;
                    }
                    let g = Guard::not_simplified(Guard::and_simplified(
                        alts[i].guard.clone(),
                        alts[j].guard.clone(),
                    ));
                    push(out, g, Rule::WfcSwitchExclusive, path);
                }
            }
            push(out, Guard::any(alts.iter().map(|a| a.guard.clone())), Rule::WfcSwitchCover, path);
            for (i, a) in alts.iter().enumerate() {
                guarded(&a.guard, out, |o| wfc_into(&a.term, &child(path, &format!("#{i}")), o));
            }
        }
    }
}

/// Two conjunctions of literals that disagree on some variable can never
/// hold together; their exclusion formula is a tautology.
fn contradictory_cubes(a: &Guard, b: &Guard) -> bool {
    match (a.cube_literals(), b.cube_literals()) {
        (Some(a), Some(b)) => a.iter().any(|(v, s)| b.iter().any(|(w, t)| v == w && s != t)),
        _ => false,
    }
}

fn sc_into(t1: &Term, t2: &Term, path: &str, out: &mut Out) {
    match (t1, t2) {
        // Unknown content: nothing can be said yet.
        (Term::DownVar(_) | Term::UpVar(_), _) | (_, Term::DownVar(_) | Term::UpVar(_)) => {}
        (Term::Symbol(a), Term::Symbol(b)) if a == b => {}
        (Term::Tuple(a), Term::Tuple(b)) if a.len() == b.len() => {
            for (i, (x, y)) in a.iter().zip(b).enumerate() {
                sc_into(x, y, &child(path, &format!("#{i}")), out);
            }
        }
        (Term::Record(a), Term::Record(b)) => sc_collections(a, b, true, path, out),
        (Term::Choice(a), Term::Choice(b)) => sc_collections(b, a, false, path, out),
        (Term::Switch(alts), _) => {
            for (i, alt) in alts.iter().enumerate() {
                guarded(&alt.guard, out, |o| sc_into(&alt.term, t2, &child(path, &format!("#{i}")), o));
            }
        }
        (_, Term::Switch(alts)) => {
            for (i, alt) in alts.iter().enumerate() {
                guarded(&alt.guard, out, |o| sc_into(t1, &alt.term, &child(path, &format!("#{i}")), o));
            }
        }
        // A symbol or tuple is junior only to the empty record.
        (Term::Symbol(_) | Term::Tuple(_), Term::Record(b)) => {
            if b.tail.is_some() {
                return;
            }
            for e in &b.elements {
                push(out, Guard::not_simplified(e.guard.clone()), Rule::ScNilOnly, &child(path, &e.label));
            }
        }
        _ => push(out, Guard::Const(false), Rule::ScFalse, path),
    }
}

/// Shared record/choice case. `wide` is the side that must contain every
/// label of `narrow`: for records the junior (left) side, for choices the
/// senior (right) side. `record` says which of the two orientations applies
/// when recursing into payloads.
fn sc_collections(wide: &Collection, narrow: &Collection, record: bool, path: &str, out: &mut Out) {
    let (missing, presence) = if record {
        (Rule::ScRecordMissing, Rule::ScRecordPresence)
    } else {
        (Rule::ScChoiceMissing, Rule::ScChoicePresence)
    };
    for n in &narrow.elements {
        let here = child(path, &n.label);
        let matches: Vec<_> = wide.elements.iter().filter(|w| w.label == n.label).collect();
        if matches.is_empty() {
            // An open tail on the wide side may still supply the label.
            if wide.tail.is_none() {
                push(out, Guard::not_simplified(n.guard.clone()), missing, &here);
            }
            continue;
        }
        let present = Guard::any(matches.iter().map(|w| w.guard.clone()));
        push(out, Guard::implies_simplified(n.guard.clone(), present), presence, &here);
        for w in matches {
            let premise = if record {
                Guard::and_simplified(w.guard.clone(), n.guard.clone())
            } else {
                Guard::and_simplified(n.guard.clone(), w.guard.clone())
            };
            guarded(&premise, out, |o| {
                if record {
                    sc_into(&w.term, &n.term, &here, o)
                } else {
                    sc_into(&n.term, &w.term, &here, o)
                }
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{Alternative, Element};

    fn v(n: &str) -> Guard {
        Guard::var(n)
    }

    fn sym(s: &str) -> Term {
        Term::symbol(s)
    }

    #[test]
    fn wfc_examples() {
        assert!(wfc(&sym("int")).is_empty());
        let r = Term::record(vec![
            Element::guarded("a", v("x"), sym("int")),
            Element::guarded("a", v("y"), sym("str")),
        ]);
        assert_eq!(wfc(&r), vec![Guard::not(Guard::and(v("x"), v("y")))]);
        let s = Term::Switch(vec![
            Alternative { guard: v("x"), term: sym("int") },
            Alternative { guard: v("y"), term: sym("str") },
        ]);
        assert_eq!(
            wfc(&s),
            vec![Guard::not(Guard::and(v("x"), v("y"))), Guard::or(v("x"), v("y"))]
        );
    }

    #[test]
    fn sc_examples() {
        assert!(sc(&sym("int"), &sym("int")).is_empty());
        assert_eq!(sc(&sym("int"), &sym("str")), vec![Guard::Const(false)]);
        let r = Term::record(vec![Element::guarded("b", v("w"), sym("int"))]);
        assert_eq!(sc(&Term::nil(), &r), vec![Guard::not(v("w"))]);
        assert!(sc(&sym("int"), &Term::nil()).is_empty());
    }

    #[test]
    fn provenance_records_rule_and_path() {
        let mut g = GeneratedConstraints::default();
        let r = Term::record(vec![Element::new(
            "p",
            Term::record(vec![
                Element::guarded("a", v("x"), sym("int")),
                Element::guarded("a", v("y"), sym("int")),
            ]),
        )]);
        g.add_wfc(&r, Some(3));
        let (f, p) = g.formulas.first().unwrap();
        assert_eq!(f, &Guard::not(Guard::and(v("x"), v("y"))));
        assert_eq!(p, &Provenance { source: Some(3), rule: Rule::WfcDuplicate, path: "p.a".into() });
    }
}
