use std::fmt;

use crate::classify::{violation, Fragment};
use crate::logic::{Ontology, Predicate, Term};

use super::{FiniteModelError, Justification, SupportOrdering};

/// `⟨t,j,k⟩`: term `t` introduced at position `k` of the `j`-th atom of a
/// support ordering (both 1-based).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct StartingPoint {
    pub term: Term,
    pub atom: usize,
    pub position: usize,
}

impl fmt::Display for StartingPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{},{},{}⟩", self.term, self.atom, self.position)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum AnnotatedTerm {
    Plain(Term),
    Start(StartingPoint),
}

impl AnnotatedTerm {
    /// The underlying term.
    pub fn term(&self) -> &Term {
        match self {
            AnnotatedTerm::Plain(t) => t,
            AnnotatedTerm::Start(sp) => &sp.term,
        }
    }
}

impl fmt::Display for AnnotatedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnnotatedTerm::Plain(t) => write!(f, "{t}"),
            AnnotatedTerm::Start(sp) => write!(f, "{sp}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct AnnotatedAtom {
    pub predicate: Predicate,
    pub args: Vec<AnnotatedTerm>,
}

impl fmt::Display for AnnotatedAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, t) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Annotates every atom of a support ordering of a model of a joinless
/// ontology.
///
/// An atom whose recorded justification is an existential rule gets a
/// starting point at each position holding an existential variable of that
/// rule. A position holding a body variable copies the annotation found at
/// that variable's body position in the justifying atom. Database atoms and
/// constant positions stay as they are.
pub fn propagation_ordering(
    ordering: &SupportOrdering,
    onto: &Ontology,
) -> Result<Vec<AnnotatedAtom>, FiniteModelError> {
    if let Some(w) = violation(onto, Fragment::Joinless) {
        return Err(FiniteModelError::NotJoinless(w.to_string()));
    }
    let index = ordering.index();
    let mut out: Vec<AnnotatedAtom> = Vec::with_capacity(ordering.len());
    for (j, step) in ordering.steps.iter().enumerate() {
        let atom = &step.atom;
        let args = match &step.justification {
            Justification::Database => atom.args.iter().cloned().map(AnnotatedTerm::Plain).collect(),
            Justification::Rule { rule, mapping } => {
                let rule = onto
                    .rule(rule)
                    .ok_or_else(|| FiniteModelError::UnknownRule(rule.clone()))?;
                let ev = rule.existential_in_order();
                let mut args = Vec::with_capacity(atom.arity());
                for (k, v) in rule.head.args.iter().enumerate() {
                    let ann = if v.is_constant() {
                        AnnotatedTerm::Plain(v.clone())
                    } else if ev.contains(v) {
                        AnnotatedTerm::Start(StartingPoint {
                            term: atom.args[k].clone(),
                            atom: j + 1,
                            position: k + 1,
                        })
                    } else {
                        let (b, l) = rule
                            .body
                            .iter()
                            .find_map(|b| b.args.iter().position(|t| t == v).map(|l| (b, l)))
                            .expect("head variable occurs in the body");
                        let source = mapping.apply_atom(b);
                        let i = *index
                            .get(&source)
                            .filter(|&&i| i < j)
                            .ok_or_else(|| FiniteModelError::BadOrdering(atom.to_string()))?;
                        out[i].args[l].clone()
                    };
                    args.push(ann);
                }
                args
            }
        };
        out.push(AnnotatedAtom {
            predicate: atom.predicate.clone(),
            args,
        });
    }
    Ok(out)
}
