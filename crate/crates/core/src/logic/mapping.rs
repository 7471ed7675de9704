use std::collections::BTreeMap;
use std::fmt;

use super::{Atom, Term};

/// A finite substitution on non-constant terms. Constants and unmapped
/// terms are left alone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Mapping(BTreeMap<Term, Term>);

impl Mapping {
    pub fn new() -> Self {
        Mapping(BTreeMap::new())
    }

    pub fn get(&self, t: &Term) -> Option<&Term> {
        self.0.get(t)
    }

    pub fn insert(&mut self, from: Term, to: Term) -> Option<Term> {
        debug_assert!(!from.is_constant(), "constants are fixed");
        self.0.insert(from, to)
    }

    pub fn remove(&mut self, t: &Term) -> Option<Term> {
        self.0.remove(t)
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.0.contains_key(t)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Term, &Term)> {
        self.0.iter()
    }

    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Constant(_) => t.clone(),
            _ => self.0.get(t).cloned().unwrap_or_else(|| t.clone()),
        }
    }

    pub fn apply_atom(&self, a: &Atom) -> Atom {
        a.map_terms(|t| self.apply(t))
    }

    /// `other ∘ self`: apply `self` first.
    pub fn then(&self, other: &Mapping) -> Mapping {
        let mut out: BTreeMap<Term, Term> = self.0.iter().map(|(k, v)| (k.clone(), other.apply(v))).collect();
        for (k, v) in &other.0 {
            out.entry(k.clone()).or_insert_with(|| v.clone());
        }
        Mapping(out)
    }

    /// Keeps only the entries whose key satisfies `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(&Term) -> bool) -> Mapping {
        Mapping(
            self.0
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        )
    }
}

impl FromIterator<(Term, Term)> for Mapping {
    fn from_iter<I: IntoIterator<Item = (Term, Term)>>(iter: I) -> Self {
        Mapping(iter.into_iter().collect())
    }
}

impl fmt::Display for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}->{v}")?;
        }
        f.write_str("}")
    }
}
