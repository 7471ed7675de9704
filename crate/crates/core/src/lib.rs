//! Existential rules over relational data.
//!
//! The crate provides a breadth-first chase (oblivious and restricted), a
//! syntactic fragment classifier, the canonical rewriting that pushes
//! constants into predicate names, and tools for finite models: support
//! orderings, propagation annotations, repair of models of the joinless part
//! of a rewritten ontology, and bounded model enumeration.
//!
//! ```
//! use shychase::parse::parse_program;
//! use shychase::chase::{run_chase, ChaseConfig};
//!
//! let p = parse_program("p(a). p(X) -> exists Y. q(X,Y).").unwrap();
//! let res = run_chase(&p.database, &p.ontology, &ChaseConfig::default());
//! assert!(res.terminated);
//! assert_eq!(res.instance.len(), 2);
//! ```

pub mod canonical;
pub mod chase;
pub mod classify;
pub mod finitemodels;
pub mod harness;
pub mod hom;
pub mod logic;
pub mod parse;

pub use logic::{
    Atom, Database, Instance, Label, Mapping, Ontology, Position, Predicate, Program, Query, Rule, Shape, Term,
};
