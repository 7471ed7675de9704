use std::fmt;
use std::sync::Arc;

/// A term: a constant, a labelled null or a variable.
///
/// Variables produced by the parser carry a `#k` suffix naming the rule
/// they belong to. The suffix is dropped when printing.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Constant(Arc<str>),
    Null(u32),
    Variable(Arc<str>),
}

impl Term {
    pub fn constant(name: &str) -> Self {
        Term::Constant(Arc::from(name))
    }

    pub fn variable(name: &str) -> Self {
        Term::Variable(Arc::from(name))
    }

    pub fn null(id: u32) -> Self {
        Term::Null(id)
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Term::Constant(_))
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Term::Null(_))
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, Term::Variable(_))
    }

    /// Variable name without the rule suffix.
    pub fn base_name(&self) -> Option<&str> {
        match self {
            Term::Variable(name) => Some(strip_suffix(name)),
            _ => None,
        }
    }
}

pub(crate) fn strip_suffix(name: &str) -> &str {
    match name.find('#') {
        Some(i) => &name[..i],
        None => name,
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Constant(c) => f.write_str(c),
            Term::Null(id) => write!(f, "_:n{id}"),
            Term::Variable(v) => f.write_str(strip_suffix(v)),
        }
    }
}
