use super::*;
use crate::canonical::{partition_active_harmless, rewrite_program, unpack_instance};
use crate::hom::isomorphic;
use crate::logic::{Atom, Database, Ontology, Predicate, Program};
use crate::parse::{parse_instance, parse_program};

const FATHER: &str = include_str!("../../data/paper/father.dlp");
const PROPAGATION: &str = include_str!("../../data/paper/propagation.dlp");
const THEOREM8: &str = include_str!("../../data/paper/theorem8.dlp");
const CONSTANT_RULE: &str = include_str!("../../data/paper/constant_rule.dlp");

fn program(s: &str) -> Program {
    parse_program(s).unwrap()
}

fn inst(s: &str) -> Instance {
    parse_instance(s).unwrap()
}

fn atoms(s: &str) -> Vec<Atom> {
    inst(s).to_vec()
}

fn theorem8_canonical() -> (Database, Ontology) {
    let c = rewrite_program(&program(THEOREM8)).unwrap();
    (c.database, c.ontology)
}

#[test]
fn father_model_checks() {
    let p = program(FATHER);
    let m = inst("p(c1). p(c2). f(c1,c2). f(c1,c1). f(c2,c1).");
    assert!(is_model(&m, &p.database, &p.ontology));
    assert!(!is_model(&inst("p(c1). p(c2). f(c1,c2)."), &p.database, &p.ontology));
    assert!(is_model(p.database.instance(), &p.database, &Ontology::default()));
}

#[test]
fn theorem8_model_violates_the_harmless_rule() {
    let (db, sc) = theorem8_canonical();
    let m = inst("s_[c]. p_[1](_:n1). r_[1](_:n1).");
    let v = first_violation(&m, &sc).unwrap();
    let rule = &sc.rules[v.rule];
    assert_eq!(rule.head.predicate.to_string(), "g_[1]");
    assert!(!is_model(&m, &db, &sc));
    let (active, _) = partition_active_harmless(&sc);
    assert!(is_model(&m, &db, &active));
}

#[test]
fn father_support_ordering() {
    let p = program(FATHER);
    let order = atoms("p(c1). p(c2). f(c1,c2). f(c1,c1). f(c2,c1).");
    let ord = check_ordering(&order, &p.database, &p.ontology).unwrap();
    // f(c1,c1) only has the existential rule as support.
    match &ord.steps[3].justification {
        Justification::Rule { rule, .. } => assert!(!p.ontology.rule(rule).unwrap().is_datalog()),
        j => panic!("{j:?}"),
    }
    let m: Instance = order.iter().cloned().collect();
    assert!(find_support_ordering(&m, &p.database, &p.ontology).is_some());
    // f(c1,c1) before its support is placed is rejected.
    let bad = atoms("f(c2,c1). p(c1). p(c2). f(c1,c2). f(c1,c1).");
    assert_eq!(check_ordering(&bad, &p.database, &p.ontology).unwrap_err(), 0);
}

#[test]
fn unsupported_atom_has_no_ordering() {
    let p = program("p(c).");
    let m = inst("p(c). g(c).");
    assert!(find_support_ordering(&m, &p.database, &p.ontology).is_none());
    assert_eq!(
        well_supported_core(&m, &p.database, &p.ontology).instance(),
        inst("p(c).")
    );
}

fn start(term: Term, atom: usize, position: usize) -> AnnotatedTerm {
    AnnotatedTerm::Start(StartingPoint { term, atom, position })
}

fn plain(t: Term) -> AnnotatedTerm {
    AnnotatedTerm::Plain(t)
}

fn annotated(pred: &str, args: Vec<AnnotatedTerm>) -> AnnotatedAtom {
    AnnotatedAtom {
        predicate: Predicate::new(pred),
        args,
    }
}

#[test]
fn propagation_example() {
    let p = program(PROPAGATION);
    let order = atoms("s(c1). p(c1,c2). p(c1,_:n1). u(c2,c1). t(c2). u(_:n1,c1). r(_:n1,c1). t(_:n1). r(c2,c1).");
    let ord = check_ordering(&order, &p.database, &p.ontology).unwrap();
    let ann = propagation_ordering(&ord, &p.ontology).unwrap();
    let c1 = Term::constant("c1");
    let c2 = Term::constant("c2");
    let n1 = Term::null(1);
    let want = vec![
        annotated("s", vec![plain(c1.clone())]),
        annotated("p", vec![plain(c1.clone()), start(c2.clone(), 2, 2)]),
        annotated("p", vec![plain(c1.clone()), start(n1.clone(), 3, 2)]),
        annotated("u", vec![start(c2.clone(), 4, 1), plain(c1.clone())]),
        annotated("t", vec![start(c2.clone(), 2, 2)]),
        annotated("u", vec![start(n1.clone(), 6, 1), plain(c1.clone())]),
        annotated("r", vec![start(n1.clone(), 3, 2), plain(c1.clone())]),
        annotated("t", vec![start(n1.clone(), 3, 2)]),
        annotated("r", vec![start(c2.clone(), 2, 2), plain(c1.clone())]),
    ];
    assert_eq!(ann, want);
    assert_eq!(ann[1].to_string(), "p(c1,⟨c2,2,2⟩)");
}

#[test]
fn database_ordering_is_unannotated() {
    let p = program("s(c1). s(c2). p(c1,c2). s(X) -> exists Y. p(X,Y).");
    let ord = find_support_ordering(p.database.instance(), &p.database, &p.ontology).unwrap();
    let ann = propagation_ordering(&ord, &p.ontology).unwrap();
    for (a, s) in ann.iter().zip(ord.atoms()) {
        assert!(a.args.iter().all(|t| matches!(t, AnnotatedTerm::Plain(_))));
        assert_eq!(a.args.iter().map(|t| t.term().clone()).collect::<Vec<_>>(), s.args);
    }
}

#[test]
fn propagation_needs_joinless() {
    let p = program("p(X), q(X) -> r(X).");
    let err = propagation_ordering(&SupportOrdering::default(), &p.ontology).unwrap_err();
    assert!(matches!(err, FiniteModelError::NotJoinless(_)));
}

fn theorem8_model() -> (Instance, SupportOrdering, Database, Ontology) {
    let (db, sc) = theorem8_canonical();
    let (active, _) = partition_active_harmless(&sc);
    let order = atoms("s_[c]. p_[1](_:n1). r_[1](_:n1).");
    let ord = check_ordering(&order, &db, &active).unwrap();
    (order.into_iter().collect(), ord, db, sc)
}

#[test]
fn theorem8_annotations() {
    let (_, ord, _, sc) = theorem8_model();
    let (active, _) = partition_active_harmless(&sc);
    let ann = propagation_ordering(&ord, &active).unwrap();
    let n1 = Term::null(1);
    // The existential sits in the only argument, position 1.
    assert_eq!(ann[1].args, vec![start(n1.clone(), 2, 1)]);
    assert_eq!(ann[2].args, vec![start(n1, 3, 1)]);
}

#[test]
fn theorem8_repair() {
    let (m, ord, db, sc) = theorem8_model();
    let res = disjoin_repair(&m, &ord, &sc).unwrap();
    let want = inst("s_[c]. p_[1](_:n1). r_[1](_:n2).");
    assert!(isomorphic(&res.instance, &want), "{}", res.instance);
    assert!(is_model(&res.instance, &db, &sc));
    let image: Instance = res.instance.iter().map(|a| res.homomorphism.apply_atom(a)).collect();
    assert!(image.is_subset(&m));
    assert_eq!(res.starting_points.len(), 1);
    let sp = res.starting_points.values().next().unwrap();
    assert_eq!((sp.atom, sp.position), (2, 1));
}

#[test]
fn repair_of_a_full_model_is_identity() {
    let (db, sc) = theorem8_canonical();
    let (active, _) = partition_active_harmless(&sc);
    let m = inst("s_[c]. p_[1](_:n1). r_[1](_:n2).");
    let ord = find_support_ordering(&m, &db, &active).unwrap();
    let res = disjoin_repair(&m, &ord, &sc).unwrap();
    assert_eq!(res.instance, m);
    assert!(res.homomorphism.is_empty());
}

#[test]
fn repair_follows_active_rules() {
    // A harmless violation whose fix triggers an active rule again.
    let p = program("s(c). s(X) -> exists Y. p(Y). s(X) -> exists Y. r(Y). p(X), r(X) -> g(X). p(X) -> q(X). q(X) -> exists Z. h(X,Z).");
    let c = rewrite_program(&p).unwrap();
    let (active, _) = partition_active_harmless(&c.ontology);
    let first = enumerate_finite_models(&c.database, &active, Budget::new(2, 8));
    assert!(first.complete);
    for m in first.models {
        let ord = find_support_ordering(&m, &c.database, &active).unwrap();
        let res = disjoin_repair(&m, &ord, &c.ontology).unwrap();
        assert!(
            is_model(&res.instance, &c.database, &c.ontology),
            "{m} -> {}",
            res.instance
        );
        let image: Instance = res.instance.iter().map(|a| res.homomorphism.apply_atom(a)).collect();
        assert!(image.is_subset(&m));
    }
}

/// Every instance over the given term pool with at most `max_atoms` atoms
/// that contains the database, filtered to minimal models.
fn brute_force_minimal_models(db: &Database, onto: &Ontology, pool: &[Term], max_atoms: usize) -> Vec<Instance> {
    let mut preds: Vec<(Predicate, usize)> = Vec::new();
    for a in db.iter().chain(onto.rules.iter().flat_map(|r| r.atoms())) {
        if !preds.iter().any(|(p, _)| *p == a.predicate) {
            preds.push((a.predicate.clone(), a.arity()));
        }
    }
    let mut universe = Vec::new();
    for (p, n) in &preds {
        let mut tuples: Vec<Vec<Term>> = vec![vec![]];
        for _ in 0..*n {
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    pool.iter().map(move |x| {
                        let mut t = t.clone();
                        t.push(x.clone());
                        t
                    })
                })
                .collect();
        }
        for t in tuples {
            let a = Atom::new(p.clone(), t);
            if !db.instance().contains(&a) {
                universe.push(a);
            }
        }
    }
    let mut models = Vec::new();
    for mask in 0u32..(1 << universe.len()) {
        if db.len() + mask.count_ones() as usize > max_atoms {
            continue;
        }
        let mut i = db.instance().clone();
        for (k, a) in universe.iter().enumerate() {
            if mask & (1 << k) != 0 {
                i.insert(a.clone());
            }
        }
        if is_model(&i, db, onto) {
            models.push((mask, i));
        }
    }
    let minimal: Vec<Instance> = models
        .iter()
        .filter(|(m, _)| !models.iter().any(|(o, _)| o != m && o & m == *o))
        .map(|(_, i)| i.clone())
        .collect();
    let mut out: Vec<Instance> = Vec::new();
    for m in minimal {
        if !out.iter().any(|o| isomorphic(o, &m)) {
            out.push(m);
        }
    }
    out
}

fn same_up_to_iso(a: &[Instance], b: &[Instance]) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.iter().any(|y| isomorphic(x, y)))
}

#[test]
fn enumeration_matches_brute_force() {
    for (src, nulls, size) in [
        ("p(c). p(X) -> exists Y. f(Y,X).", 1, 3),
        ("p(c). p(X) -> exists Y. f(Y,X). f(X,Y) -> p(X).", 2, 4),
        ("p(c). p(X) -> exists Y. e(X,Y). e(X,Y) -> q(Y).", 1, 4),
        ("a(c). b(d). a(X), b(Y) -> exists Z. r(X,Z).", 1, 3),
    ] {
        let p = program(src);
        let mut pool: Vec<Term> = crate::logic::constants_of(&p.database, &p.ontology)
            .into_iter()
            .collect();
        pool.extend((1..=nulls as u32).map(Term::null));
        let want = brute_force_minimal_models(&p.database, &p.ontology, &pool, size);
        let got = enumerate_finite_models(&p.database, &p.ontology, Budget::new(nulls, size));
        assert!(got.complete);
        assert!(
            same_up_to_iso(&got.models, &want),
            "{src}: {:?} vs {:?}",
            got.models,
            want
        );
    }
}

#[test]
fn enumeration_examples() {
    let p = program("p(c). p(X) -> exists Y. f(Y,X).");
    let got = enumerate_finite_models(&p.database, &p.ontology, Budget::new(1, 3)).models;
    assert!(got.iter().any(|m| *m == inst("p(c). f(c,c).")));
    assert!(got.iter().any(|m| isomorphic(m, &inst("p(c). f(_:n1,c)."))));
    assert_eq!(got.len(), 2);

    let d = program("p(c). q(d).");
    let got = enumerate_finite_models(&d.database, &d.ontology, Budget::new(1, 3)).models;
    assert_eq!(got, vec![d.database.instance().clone()]);

    let (db, sc) = theorem8_canonical();
    let (active, _) = partition_active_harmless(&sc);
    let got = enumerate_finite_models(&db, &active, Budget::new(1, 4)).models;
    assert!(got
        .iter()
        .any(|m| isomorphic(m, &inst("s_[c]. p_[1](_:n1). r_[1](_:n1)."))));
}

#[test]
fn countermodels() {
    let p = program("p(c). p(X) -> exists Y. f(Y,X). ? f(c,c). ? p(X).");
    let found = find_finite_countermodel(&p.database, &p.ontology, &p.queries[0], Budget::new(1, 3)).unwrap();
    assert!(isomorphic(&found, &inst("p(c). f(_:n1,c).")));
    assert!(find_finite_countermodel(&p.database, &p.ontology, &p.queries[1], Budget::new(1, 3)).is_none());
}

#[test]
fn minimal_models_are_well_supported() {
    for src in [FATHER, PROPAGATION, THEOREM8] {
        let p = program(src);
        let e = enumerate_finite_models(&p.database, &p.ontology, Budget::new(2, 9));
        assert!(!e.models.is_empty());
        for m in &e.models {
            assert!(find_support_ordering(m, &p.database, &p.ontology).is_some(), "{m}");
        }
    }
}

#[test]
fn padded_model_shrinks_to_a_model() {
    let p = program(FATHER);
    let m = inst("p(c1). p(c2). f(c1,c2). f(c1,c1). f(c2,c1). f(_:n1,_:n2). f(_:n2,_:n1). p(_:n1). p(_:n2).");
    assert!(is_model(&m, &p.database, &p.ontology));
    let core = well_supported_core(&m, &p.database, &p.ontology).instance();
    assert_eq!(core.len(), 5);
    assert!(is_model(&core, &p.database, &p.ontology));
}

#[test]
fn smooth_examples() {
    let (s, f) = smooth_instance(&inst("p_[1](a)."));
    assert_eq!(s, inst("p_[1](_:n1)."));
    assert_eq!(f.get(&Term::constant("a")), Some(&Term::null(1)));
    let free = inst("q_[1,2](_:n1,_:n2).");
    assert_eq!(smooth_instance(&free), (free.clone(), BTreeMap::new()));
    assert_eq!(
        smooth_instance(&inst("q_[1,2](a,_:n1).")).0,
        inst("q_[1,2](_:n2,_:n1).")
    );
}

#[test]
fn smooth_model_unpacks_to_a_model() {
    let p = program(CONSTANT_RULE);
    let c = rewrite_program(&p).unwrap();
    let m = inst("p_[1](a).");
    assert!(is_model(&m, &c.database, &c.ontology));
    let raw = unpack_instance(&m).unwrap();
    assert!(!is_model(&raw, &p.database, &p.ontology));
    let (s, _) = smooth_instance(&m);
    assert!(is_model(&s, &c.database, &c.ontology));
    assert!(is_model(&unpack_instance(&s).unwrap(), &p.database, &p.ontology));
}
