//! Finite models: model checking, support orderings, propagation
//! annotations, repair of models of the joinless part of a canonical
//! ontology, and budgeted model search.

mod enumerate;
mod propagation;
mod repair;
mod support;

use std::collections::BTreeMap;

use crate::logic::{Instance, Mapping, Term};

pub use enumerate::{
    enumerate_finite_models, enumerate_models, find_finite_countermodel, has_submodel, is_minimal_model, Budget,
    Enumeration,
};
pub use propagation::{propagation_ordering, AnnotatedAtom, AnnotatedTerm, StartingPoint};
pub use repair::{disjoin_repair, RepairResult};
pub use support::{
    check_ordering, find_support_ordering, first_violation, is_model, support_for, well_supported_core, Justification,
    SupportOrdering, SupportStep, Violation,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FiniteModelError {
    #[error("ontology is not joinless: {0}")]
    NotJoinless(String),
    #[error("ordering names unknown rule {0}")]
    UnknownRule(String),
    #[error("justification of {0} does not point to earlier atoms")]
    BadOrdering(String),
    #[error("input is not a model of the active rules: {0} has no match")]
    NotAModel(String),
    #[error("no starting point can resolve the violation of {rule} under {mapping}")]
    Stuck { rule: String, mapping: Mapping },
    #[error("repair did not converge")]
    Budget,
}

/// A copy of `inst` with every constant replaced by a fresh null. Nulls are
/// kept. Returns the renaming of the constants.
pub fn smooth_instance(inst: &Instance) -> (Instance, BTreeMap<Term, Term>) {
    let base = inst.max_null().map_or(1, |n| n + 1);
    let renaming: BTreeMap<Term, Term> = inst
        .constants()
        .into_iter()
        .zip(base..)
        .map(|(c, i)| (c, Term::null(i)))
        .collect();
    let out = inst
        .iter()
        .map(|a| a.map_terms(|t| renaming.get(t).cloned().unwrap_or_else(|| t.clone())))
        .collect();
    (out, renaming)
}

#[cfg(test)]
mod test;
