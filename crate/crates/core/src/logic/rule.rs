use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::term::strip_suffix;
use super::{Atom, LogicError, Term};

/// An existential rule `body -> exists EV. head` with a single head atom.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Rule {
    pub id: Arc<str>,
    pub body: Vec<Atom>,
    pub head: Atom,
}

impl Rule {
    pub fn new(id: &str, body: Vec<Atom>, head: Atom) -> Result<Rule, LogicError> {
        if body.is_empty() {
            return Err(LogicError::EmptyBody(id.to_string()));
        }
        if body.iter().chain(Some(&head)).any(|a| a.args.iter().any(Term::is_null)) {
            return Err(LogicError::NullInRule(id.to_string()));
        }
        Ok(Rule {
            id: Arc::from(id),
            body,
            head,
        })
    }

    /// Body variables in order of first occurrence.
    pub fn universal_in_order(&self) -> Vec<Term> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for t in self.body.iter().flat_map(|a| a.variables()) {
            if seen.insert(t) {
                out.push(t.clone());
            }
        }
        out
    }

    /// Head-only variables in order of first occurrence.
    pub fn existential_in_order(&self) -> Vec<Term> {
        let universal: BTreeSet<&Term> = self.body.iter().flat_map(|a| a.variables()).collect();
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for t in self.head.variables() {
            if !universal.contains(t) && seen.insert(t) {
                out.push(t.clone());
            }
        }
        out
    }

    /// `(universal, existential)` variable sets.
    pub fn variables_of(&self) -> (BTreeSet<Term>, BTreeSet<Term>) {
        (
            self.universal_in_order().into_iter().collect(),
            self.existential_in_order().into_iter().collect(),
        )
    }

    pub fn is_datalog(&self) -> bool {
        self.existential_in_order().is_empty()
    }

    /// Body atoms followed by the head.
    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.body.iter().chain(Some(&self.head))
    }

    pub fn constants(&self) -> impl Iterator<Item = &Term> {
        self.atoms().flat_map(|a| a.args.iter()).filter(|t| t.is_constant())
    }

    /// Renames every variable `V` to `V#suffix`.
    pub fn with_suffix(&self, suffix: &str) -> Rule {
        let rename = |t: &Term| match t {
            Term::Variable(v) => Term::Variable(Arc::from(format!("{}#{suffix}", strip_suffix(v)))),
            other => other.clone(),
        };
        Rule {
            id: self.id.clone(),
            body: self.body.iter().map(|a| a.map_terms(rename)).collect(),
            head: self.head.map_terms(rename),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(" -> ")?;
        let ev = self.existential_in_order();
        if !ev.is_empty() {
            f.write_str("exists ")?;
            for (i, v) in ev.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{v}")?;
            }
            f.write_str(". ")?;
        }
        write!(f, "{}.", self.head)
    }
}

/// An ordered list of rules.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Ontology {
    pub rules: Vec<Rule>,
}

impl Ontology {
    pub fn new(rules: Vec<Rule>) -> Self {
        Ontology { rules }
    }

    /// Gives every rule private variables by suffixing them with the rule's
    /// 1-based index.
    pub fn normalized(rules: Vec<Rule>) -> Self {
        Ontology {
            rules: rules
                .iter()
                .enumerate()
                .map(|(i, r)| r.with_suffix(&(i + 1).to_string()))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn rule(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| &*r.id == id)
    }
}

/// A union of conjunctive queries; every variable is existentially quantified.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Query {
    pub disjuncts: Vec<Vec<Atom>>,
}

impl Query {
    pub fn new(disjuncts: Vec<Vec<Atom>>) -> Result<Query, LogicError> {
        if disjuncts.is_empty() || disjuncts.iter().any(Vec::is_empty) {
            return Err(LogicError::EmptyQuery);
        }
        if disjuncts.iter().flatten().any(|a| a.args.iter().any(Term::is_null)) {
            return Err(LogicError::NullInQuery);
        }
        Ok(Query { disjuncts })
    }

    pub fn conjunctive(atoms: Vec<Atom>) -> Result<Query, LogicError> {
        Query::new(vec![atoms])
    }

    pub fn constants(&self) -> impl Iterator<Item = &Term> {
        self.disjuncts
            .iter()
            .flatten()
            .flat_map(|a| a.args.iter())
            .filter(|t| t.is_constant())
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("? ")?;
        for (d, atoms) in self.disjuncts.iter().enumerate() {
            if d > 0 {
                f.write_str(" | ")?;
            }
            for (i, a) in atoms.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
        }
        f.write_str(".")
    }
}
