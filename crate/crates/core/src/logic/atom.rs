use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::Term;

/// One entry of a canonical shape: a constant or an equality-class index.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Label {
    Const(Arc<str>),
    Index(u32),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Const(c) => f.write_str(c),
            Label::Index(i) => write!(f, "{i}"),
        }
    }
}

/// The bracketed suffix of a canonical predicate, e.g. `[1,c,1,2]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Shape(Arc<[Label]>);

impl Shape {
    pub fn new(labels: Vec<Label>) -> Self {
        Shape(labels.into())
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    /// Length of the source atom the shape stands for.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of distinct integer labels, i.e. the arity of the canonical atom.
    pub fn companion_arity(&self) -> usize {
        self.0
            .iter()
            .filter_map(|l| match l {
                Label::Index(i) => Some(*i),
                Label::Const(_) => None,
            })
            .max()
            .unwrap_or(0) as usize
    }

    /// Integer labels must appear in first-use order starting at 1.
    pub fn is_well_formed(&self) -> bool {
        let mut max = 0;
        for l in self.0.iter() {
            if let Label::Index(i) = l {
                if *i == 0 || *i > max + 1 {
                    return false;
                }
                max = max.max(*i);
            }
        }
        true
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("]")
    }
}

/// A predicate symbol. The shape, when present, is part of its identity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Predicate {
    pub name: Arc<str>,
    pub shape: Option<Shape>,
}

impl Predicate {
    pub fn new(name: &str) -> Self {
        Predicate {
            name: Arc::from(name),
            shape: None,
        }
    }

    pub fn shaped(name: &str, shape: Shape) -> Self {
        Predicate {
            name: Arc::from(name),
            shape: Some(shape),
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if let Some(shape) = &self.shape {
            write!(f, "_{shape}")?;
        }
        Ok(())
    }
}

/// An argument slot `p[i]`, 1-based.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Position {
    pub predicate: Predicate,
    pub index: usize,
}

impl Position {
    pub fn new(predicate: Predicate, index: usize) -> Self {
        Position { predicate, index }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.predicate, self.index)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Atom {
    pub predicate: Predicate,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: Predicate, args: Vec<Term>) -> Self {
        Atom { predicate, args }
    }

    /// Shorthand for an unshaped atom.
    pub fn plain(name: &str, args: Vec<Term>) -> Self {
        Atom::new(Predicate::new(name), args)
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    /// No term occurs twice.
    pub fn is_simple(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.args.iter().all(|t| seen.insert(t))
    }

    pub fn is_ground(&self) -> bool {
        !self.args.iter().any(Term::is_variable)
    }

    pub fn variables(&self) -> impl Iterator<Item = &Term> {
        self.args.iter().filter(|t| t.is_variable())
    }

    pub fn position(&self, i: usize) -> Position {
        Position::new(self.predicate.clone(), i + 1)
    }

    pub fn map_terms(&self, mut f: impl FnMut(&Term) -> Term) -> Atom {
        Atom {
            predicate: self.predicate.clone(),
            args: self.args.iter().map(&mut f).collect(),
        }
    }
}

impl fmt::Display for Atom {
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
