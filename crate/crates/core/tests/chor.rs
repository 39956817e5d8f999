use mdl_core::chor::GraphError;
use mdl_core::{is_senior, parse_chor, solve, BoolAssignment, ServiceGraph, SolveOptions};

fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn three_buyer() -> ServiceGraph {
    parse_chor(&fixture("three_buyer.chor"), Some("three_buyer.chor")).unwrap()
}

#[test]
fn empty_graph() {
    let g = parse_chor("", None).unwrap();
    assert!(g.derive_constraints().unwrap().is_empty());
    let r = g.configure(&SolveOptions::default()).unwrap();
    assert!(r.is_sat() && r.services.is_empty());
}

#[test]
fn alice_to_seller_constraint() {
    let g = three_buyer();
    let cs = g.derive_constraints().unwrap();
    assert_eq!(cs.len(), 6);
    let alice = g.service("Alice").unwrap().port("AS").unwrap();
    let seller = g.service("Seller").unwrap().port("AS").unwrap();
    let first = &cs.constraints[0];
    assert_eq!((&first.lhs, &first.rhs), (&alice.term, &seller.term));
    assert_eq!(first.origin.label.as_deref(), Some("Alice.AS -> Seller.AS"));
}

#[test]
fn single_service_is_echoed() {
    let src = "service Echo {\n  in Req: { body: string };\n  out Resp: (: ok: { body: string }, err(x): {} :);\n}\n";
    let g = parse_chor(src, None).unwrap();
    let r = g.configure(&SolveOptions::default()).unwrap();
    assert!(r.is_sat());
    for p in &r.services[0].ports {
        assert_eq!(p.original, p.solved, "{}", p.name);
        assert!(p.dropped.is_empty());
    }
}

/// Every channel holds on the configured interfaces.
fn channels_hold(original: &ServiceGraph) {
    let r = original.configure(&SolveOptions::default()).unwrap();
    assert!(r.is_sat());
    let solved = r.solved_graph(original);
    for c in &solved.channels {
        let out = &solved.service(&c.from.service).unwrap().port(&c.from.port).unwrap().term;
        let inp = &solved.service(&c.to.service).unwrap().port(&c.to.port).unwrap().term;
        let (out, inp) = (out.canonicalize(None).unwrap(), inp.canonicalize(None).unwrap());
        assert!(is_senior(&out, &inp), "{c}: {out} vs {inp}");
    }
    // configuring the result again changes nothing
    let again = solved.configure(&SolveOptions::default()).unwrap();
    assert!(again.is_sat());
    for (s, t) in r.services.iter().zip(&again.services) {
        for (p, q) in s.ports.iter().zip(&t.ports) {
            assert_eq!(p.solved, q.solved, "{}.{}", s.name, p.name);
            assert!(q.dropped.is_empty());
        }
    }
}

#[test]
fn solved_graph_satisfies_every_channel() {
    channels_hold(&three_buyer());
    channels_hold(&parse_chor(&fixture("three_buyer_no_share.chor"), None).unwrap());
}

#[test]
fn removing_a_channel_stays_satisfiable() {
    let g = three_buyer();
    for i in 0..g.channels.len() {
        let mut smaller = g.clone();
        let gone = smaller.channels.remove(i);
        let r = smaller.configure(&SolveOptions::default()).unwrap();
        assert!(r.is_sat(), "without {gone}");
    }
}

#[test]
fn configuration_matches_direct_solve() {
    let g = three_buyer();
    let report = solve(&g.derive_constraints().unwrap(), &SolveOptions::default()).unwrap();
    let s = report.verdict.solution().unwrap();
    let r = g.configure(&SolveOptions::default()).unwrap();
    let bvals: BoolAssignment = r.bvars.iter().map(|(k, v)| (k.clone(), *v)).collect();
    assert_eq!(bvals, s.bvals);
}

#[test]
fn graph_errors() {
    let dangling = parse_chor("service A { out P: int; }\nchannel A.P -> B.Q;", None).unwrap();
    assert!(matches!(dangling.derive_constraints(), Err(GraphError::DanglingChannel { .. })));
    let wrong_role = parse_chor("service A { in P: int; }\nservice B { in Q: int; }\nchannel A.P -> B.Q;", None).unwrap();
    assert!(matches!(wrong_role.derive_constraints(), Err(GraphError::RoleMismatch { .. })));
    let twice = parse_chor("service A { out P: int; }\nservice A { in Q: int; }", None).unwrap();
    assert!(matches!(twice.derive_constraints(), Err(GraphError::DuplicateService(_))));
}

#[test]
fn unsat_graph_names_channel() {
    let src = "service A { out P: int; }\nservice B { in Q: string; }\nchannel A.P -> B.Q;";
    let r = parse_chor(src, None).unwrap().configure(&SolveOptions::default()).unwrap();
    assert!(!r.is_sat());
    assert_eq!(r.unsat_channels, ["A.P -> B.Q"]);
}
