use std::collections::{BTreeSet, HashMap};
use std::fmt;

use indexmap::IndexSet;

use super::{Atom, LogicError, Predicate, Term};

/// A finite set of atoms kept in insertion order, indexed by predicate and
/// by (predicate, position, term).
///
/// Atom indices are stable: atoms are never removed.
#[derive(Clone, Default)]
pub struct Instance {
    atoms: IndexSet<Atom>,
    pred_ids: HashMap<Predicate, u32>,
    by_pred: Vec<Vec<usize>>,
    by_arg: HashMap<(u32, u32, Term), Vec<usize>>,
}

const EMPTY: &[usize] = &[];

impl Instance {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_atoms<I: IntoIterator<Item = Atom>>(atoms: I) -> Self {
        let mut inst = Instance::new();
        for a in atoms {
            inst.insert(a);
        }
        inst
    }

    /// Returns `true` when the atom was not already present.
    pub fn insert(&mut self, atom: Atom) -> bool {
        if self.atoms.contains(&atom) {
            return false;
        }
        let next = self.by_pred.len() as u32;
        let pid = *self.pred_ids.entry(atom.predicate.clone()).or_insert(next);
        if pid == next {
            self.by_pred.push(Vec::new());
        }
        let idx = self.atoms.len();
        self.by_pred[pid as usize].push(idx);
        for (i, t) in atom.args.iter().enumerate() {
            self.by_arg.entry((pid, i as u32, t.clone())).or_default().push(idx);
        }
        self.atoms.insert(atom);
        true
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.atoms.contains(atom)
    }

    pub fn index_of(&self, atom: &Atom) -> Option<usize> {
        self.atoms.get_index_of(atom)
    }

    pub fn get(&self, idx: usize) -> &Atom {
        &self.atoms[idx]
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.iter()
    }

    /// Indices of atoms over `pred`, ascending.
    pub fn with_predicate(&self, pred: &Predicate) -> &[usize] {
        match self.pred_ids.get(pred) {
            Some(&pid) => &self.by_pred[pid as usize],
            None => EMPTY,
        }
    }

    /// Indices of atoms over `pred` holding `term` at 0-based `pos`, ascending.
    pub fn with_argument(&self, pred: &Predicate, pos: usize, term: &Term) -> &[usize] {
        let Some(&pid) = self.pred_ids.get(pred) else {
            return EMPTY;
        };
        self.by_arg
            .get(&(pid, pos as u32, term.clone()))
            .map(Vec::as_slice)
            .unwrap_or(EMPTY)
    }

    pub fn terms(&self) -> BTreeSet<Term> {
        self.atoms.iter().flat_map(|a| a.args.iter().cloned()).collect()
    }

    pub fn constants(&self) -> BTreeSet<Term> {
        self.terms().into_iter().filter(Term::is_constant).collect()
    }

    pub fn nulls(&self) -> BTreeSet<Term> {
        self.terms().into_iter().filter(Term::is_null).collect()
    }

    pub fn max_null(&self) -> Option<u32> {
        self.atoms
            .iter()
            .flat_map(|a| a.args.iter())
            .filter_map(|t| match t {
                Term::Null(n) => Some(*n),
                _ => None,
            })
            .max()
    }

    /// Every term is a constant or a null.
    pub fn is_ground(&self) -> bool {
        self.atoms.iter().all(Atom::is_ground)
    }

    pub fn is_subset(&self, other: &Instance) -> bool {
        self.atoms.iter().all(|a| other.contains(a))
    }

    pub fn sorted(&self) -> Vec<Atom> {
        let mut v: Vec<Atom> = self.atoms.iter().cloned().collect();
        v.sort();
        v
    }

    pub fn to_vec(&self) -> Vec<Atom> {
        self.atoms.iter().cloned().collect()
    }
}

/// Set equality; insertion order is ignored.
impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.atoms == other.atoms
    }
}

impl Eq for Instance {}

impl fmt::Debug for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.atoms.iter().map(|a| a.to_string())).finish()
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.atoms {
            writeln!(f, "{a}.")?;
        }
        Ok(())
    }
}

impl FromIterator<Atom> for Instance {
    fn from_iter<I: IntoIterator<Item = Atom>>(iter: I) -> Self {
        Instance::from_atoms(iter)
    }
}

/// A finite set of facts over constants only.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Database {
    instance: Instance,
}

impl Database {
    pub fn new<I: IntoIterator<Item = Atom>>(atoms: I) -> Result<Self, LogicError> {
        let instance = Instance::from_atoms(atoms);
        if let Some(bad) = instance.iter().find(|a| !a.args.iter().all(Term::is_constant)) {
            return Err(LogicError::NonGroundFact(bad.to_string()));
        }
        Ok(Database { instance })
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn into_instance(self) -> Instance {
        self.instance
    }

    pub fn len(&self) -> usize {
        self.instance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instance.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        self.instance.iter()
    }
}
