use std::collections::HashMap;
use std::fmt;
use std::ops::ControlFlow;

use crate::hom::Matcher;
use crate::logic::{Atom, Database, Instance, Mapping, Ontology, Rule, Term};

/// The first rule (in order) whose body has a match in `inst` that does not
/// extend to the head, with that match.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub rule: usize,
    pub mapping: Mapping,
}

pub fn first_violation(inst: &Instance, onto: &Ontology) -> Option<Violation> {
    for (ri, rule) in onto.rules.iter().enumerate() {
        let mut found = None;
        let _ = Matcher::new(&rule.body, inst).for_each(&Mapping::new(), |m, _| {
            if crate::chase::head_satisfied(rule, m, inst) {
                ControlFlow::Continue(())
            } else {
                found = Some(m.clone());
                ControlFlow::Break(())
            }
        });
        if let Some(mapping) = found {
            return Some(Violation { rule: ri, mapping });
        }
    }
    None
}

/// `inst` contains the database and satisfies every rule.
pub fn is_model(inst: &Instance, db: &Database, onto: &Ontology) -> bool {
    db.iter().all(|a| inst.contains(a)) && first_violation(inst, onto).is_none()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    Database,
    Rule { rule: String, mapping: Mapping },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportStep {
    pub atom: Atom,
    pub justification: Justification,
}

/// An ordering of a finite instance in which every atom is a database fact
/// or is produced by a rule from earlier atoms.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SupportOrdering {
    pub steps: Vec<SupportStep>,
}

impl SupportOrdering {
    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.steps.iter().map(|s| &s.atom)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn instance(&self) -> Instance {
        self.atoms().cloned().collect()
    }

    /// 0-based positions of the atoms.
    pub fn index(&self) -> HashMap<&Atom, usize> {
        self.atoms().enumerate().map(|(i, a)| (a, i)).collect()
    }
}

impl fmt::Display for SupportOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            match &s.justification {
                Justification::Database => writeln!(f, "{:>3}. {}  [database]", i + 1, s.atom)?,
                Justification::Rule { rule, mapping } => writeln!(f, "{:>3}. {}  [{rule} {mapping}]", i + 1, s.atom)?,
            }
        }
        Ok(())
    }
}

/// Matches of `head` onto `atom`, as a seed for the body search.
fn unify_head(head: &Atom, atom: &Atom) -> Option<Mapping> {
    if head.predicate != atom.predicate || head.arity() != atom.arity() {
        return None;
    }
    let mut m = Mapping::new();
    for (s, t) in head.args.iter().zip(&atom.args) {
        match s {
            Term::Constant(_) if s != t => return None,
            Term::Constant(_) => {}
            _ => match m.get(s) {
                Some(b) if b != t => return None,
                Some(_) => {}
                None => {
                    m.insert(s.clone(), t.clone());
                }
            },
        }
    }
    Some(m)
}

fn rule_support(rule: &Rule, atom: &Atom, prefix: &Instance) -> Option<Mapping> {
    let seed = unify_head(&rule.head, atom)?;
    Matcher::new(&rule.body, prefix).first(&seed)
}

/// A justification for `atom` from the atoms of `prefix`. Datalog rules are
/// tried first, so an atom gets an existential justification only when no
/// other kind exists.
pub fn support_for(atom: &Atom, prefix: &Instance, onto: &Ontology) -> Option<(usize, Mapping)> {
    let datalog = onto.rules.iter().enumerate().filter(|(_, r)| r.is_datalog());
    let existential = onto.rules.iter().enumerate().filter(|(_, r)| !r.is_datalog());
    datalog
        .chain(existential)
        .find_map(|(i, r)| rule_support(r, atom, prefix).map(|m| (i, m)))
}

/// Greedy saturation: repeatedly place any atom that is a database fact or
/// supported by the atoms already placed. The placed atoms form the largest
/// well-supported subset of `inst`.
pub fn well_supported_core(inst: &Instance, db: &Database, onto: &Ontology) -> SupportOrdering {
    let mut placed = Instance::new();
    let mut steps = Vec::new();
    let mut pending: Vec<&Atom> = inst.iter().collect();
    loop {
        let mut progress = false;
        let mut rest = Vec::new();
        for a in pending {
            let justification = if db.instance().contains(a) {
                Some(Justification::Database)
            } else {
                support_for(a, &placed, onto).map(|(ri, mapping)| Justification::Rule {
                    rule: onto.rules[ri].id.to_string(),
                    mapping,
                })
            };
            match justification {
                Some(j) => {
                    placed.insert(a.clone());
                    steps.push(SupportStep {
                        atom: a.clone(),
                        justification: j,
                    });
                    progress = true;
                }
                None => rest.push(a),
            }
        }
        pending = rest;
        if !progress || pending.is_empty() {
            return SupportOrdering { steps };
        }
    }
}

pub fn find_support_ordering(model: &Instance, db: &Database, onto: &Ontology) -> Option<SupportOrdering> {
    let ord = well_supported_core(model, db, onto);
    (ord.len() == model.len()).then_some(ord)
}

/// Checks a given ordering, returning the 0-based index of the first atom
/// that is not supported by its predecessors.
pub fn check_ordering(atoms: &[Atom], db: &Database, onto: &Ontology) -> Result<SupportOrdering, usize> {
    let mut prefix = Instance::new();
    let mut steps = Vec::new();
    for (i, a) in atoms.iter().enumerate() {
        let justification = if db.instance().contains(a) {
            Justification::Database
        } else {
            let (ri, mapping) = support_for(a, &prefix, onto).ok_or(i)?;
            Justification::Rule {
                rule: onto.rules[ri].id.to_string(),
                mapping,
            }
        };
        prefix.insert(a.clone());
        steps.push(SupportStep {
            atom: a.clone(),
            justification,
        });
    }
    Ok(SupportOrdering { steps })
}
