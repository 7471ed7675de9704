//! Terms, atoms, rules, queries and instances.

mod atom;
mod instance;
mod mapping;
mod rule;
mod term;

use std::collections::BTreeSet;

pub use atom::{Atom, Label, Position, Predicate, Shape};
pub use instance::{Database, Instance};
pub use mapping::Mapping;
pub use rule::{Ontology, Query, Rule};
pub use term::Term;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LogicError {
    #[error("rule {0} has an empty body")]
    EmptyBody(String),
    #[error("rule {0} mentions a labelled null")]
    NullInRule(String),
    #[error("fact {0} is not ground over constants")]
    NonGroundFact(String),
    #[error("query has an empty disjunct")]
    EmptyQuery,
    #[error("query mentions a labelled null")]
    NullInQuery,
}

/// A parsed input file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Program {
    pub database: Database,
    pub ontology: Ontology,
    pub queries: Vec<Query>,
}

/// Constants occurring as arguments in the database or the rules.
pub fn constants_of(db: &Database, onto: &Ontology) -> BTreeSet<Term> {
    let mut out: BTreeSet<Term> = db.instance().constants();
    out.extend(onto.rules.iter().flat_map(|r| r.constants().cloned()));
    out
}

/// Every position of every predicate mentioned by the rules.
pub fn positions_of(onto: &Ontology) -> BTreeSet<Position> {
    onto.rules
        .iter()
        .flat_map(|r| r.atoms())
        .flat_map(|a| (0..a.arity()).map(move |i| a.position(i)))
        .collect()
}

#[cfg(test)]
mod test {
    use super::*;

    fn v(n: &str) -> Term {
        Term::variable(n)
    }

    fn c(n: &str) -> Term {
        Term::constant(n)
    }

    #[test]
    fn variables_split_into_universal_and_existential() {
        let r = Rule::new(
            "r1",
            vec![Atom::plain("person", vec![v("X")])],
            Atom::plain("fatherOf", vec![v("Y"), v("X")]),
        )
        .unwrap();
        let (uv, ev) = r.variables_of();
        assert_eq!(uv.into_iter().collect::<Vec<_>>(), vec![v("X")]);
        assert_eq!(ev.into_iter().collect::<Vec<_>>(), vec![v("Y")]);
        assert!(!r.is_datalog());
    }

    #[test]
    fn rule_display_strips_suffix() {
        let r = Rule::new(
            "r1",
            vec![Atom::plain("person", vec![v("X")])],
            Atom::plain("fatherOf", vec![v("Y"), v("X")]),
        )
        .unwrap();
        let o = Ontology::normalized(vec![r]);
        assert_eq!(o.rules[0].head.args[0], v("Y#1"));
        assert_eq!(o.rules[0].to_string(), "person(X) -> exists Y. fatherOf(Y,X).");
    }

    #[test]
    fn empty_body_rejected() {
        assert!(Rule::new("r1", vec![], Atom::plain("p", vec![])).is_err());
    }

    #[test]
    fn shape_arity_and_form() {
        let s = Shape::new(vec![
            Label::Index(1),
            Label::Const("c".into()),
            Label::Index(1),
            Label::Index(2),
        ]);
        assert_eq!(s.companion_arity(), 2);
        assert_eq!(s.len(), 4);
        assert!(s.is_well_formed());
        assert!(!Shape::new(vec![Label::Index(2)]).is_well_formed());
        let p = Predicate::shaped("g", s);
        assert_eq!(p.to_string(), "g_[1,c,1,2]");
    }

    #[test]
    fn simple_atoms() {
        assert!(Atom::plain("p", vec![v("X"), v("Y")]).is_simple());
        assert!(!Atom::plain("p", vec![v("X"), v("X")]).is_simple());
        assert!(!Atom::plain("p", vec![c("a"), c("a")]).is_simple());
    }

    #[test]
    fn instance_indexes_and_set_equality() {
        let a = Atom::plain("p", vec![c("a"), Term::null(1)]);
        let b = Atom::plain("p", vec![c("b"), Term::null(1)]);
        let mut i = Instance::new();
        assert!(i.insert(a.clone()));
        assert!(!i.insert(a.clone()));
        i.insert(b.clone());
        let p = Predicate::new("p");
        assert_eq!(i.with_predicate(&p), &[0, 1]);
        assert_eq!(i.with_argument(&p, 1, &Term::null(1)), &[0, 1]);
        assert_eq!(i.with_argument(&p, 0, &c("b")), &[1]);
        let j = Instance::from_atoms(vec![b, a]);
        assert_eq!(i, j);
        assert_eq!(i.max_null(), Some(1));
    }

    #[test]
    fn database_rejects_nulls() {
        assert!(Database::new(vec![Atom::plain("p", vec![Term::null(1)])]).is_err());
    }

    #[test]
    fn mapping_composition() {
        let f: Mapping = [(v("X"), v("Y"))].into_iter().collect();
        let g: Mapping = [(v("Y"), c("a"))].into_iter().collect();
        let h = f.then(&g);
        assert_eq!(h.apply(&v("X")), c("a"));
        assert_eq!(h.apply(&v("Y")), c("a"));
        assert_eq!(h.apply(&c("b")), c("b"));
    }
}
