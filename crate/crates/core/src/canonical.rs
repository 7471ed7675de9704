//! Canonical rewriting: constants and equalities move into predicate names.
//!
//! `g(X,c,X,Y)` becomes `g_[1,c,1,2](X,Y)`. A rule is rewritten once per
//! safe substitution pattern of its body variables (each one sent to a
//! constant or to an equality class), a query once per pattern of all its
//! variables. Patterns are generated with classes numbered by first use and
//! a final isomorphism pass removes the remaining duplicates.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::hom::isomorphic_atoms;
use crate::logic::{
    constants_of, Atom, Database, Instance, Label, Ontology, Predicate, Program, Query, Rule, Shape, Term,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CanonicalError {
    #[error("{0} already carries a shape")]
    AlreadyCanonical(String),
    #[error("{atom} has {got} arguments but its shape needs {want}")]
    ShapeArity { atom: String, got: usize, want: usize },
    #[error("{0} has no shape to unpack")]
    Unshaped(String),
}

/// Image of a variable under a substitution pattern.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum PatternValue {
    Const(Arc<str>),
    Class(u32),
}

/// A substitution given by the image of each variable, in the order the
/// variables first occur.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct SubstitutionPattern {
    pub assignment: Vec<(Term, PatternValue)>,
}

impl SubstitutionPattern {
    /// The substitution itself: constants stay, each class goes to the
    /// first variable assigned to it.
    pub fn substitution(&self) -> BTreeMap<Term, Term> {
        let mut rep: BTreeMap<u32, Term> = BTreeMap::new();
        self.assignment
            .iter()
            .map(|(v, val)| {
                let image = match val {
                    PatternValue::Const(c) => Term::Constant(c.clone()),
                    PatternValue::Class(k) => rep.entry(*k).or_insert_with(|| v.clone()).clone(),
                };
                (v.clone(), image)
            })
            .collect()
    }

    pub fn apply(&self, a: &Atom) -> Atom {
        let s = self.substitution();
        a.map_terms(|t| s.get(t).cloned().unwrap_or_else(|| t.clone()))
    }
}

impl fmt::Display for SubstitutionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.substitution();
        f.write_str("{")?;
        for (i, (k, v)) in s.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}->{v}")?;
        }
        f.write_str("}")
    }
}

/// Canonical form of an atom. Nulls and variables are treated alike.
pub fn canonical_atom(a: &Atom) -> Atom {
    debug_assert!(a.predicate.shape.is_none(), "atom {a} is already canonical");
    let mut labels = Vec::with_capacity(a.arity());
    let mut seen: Vec<&Term> = Vec::new();
    for t in &a.args {
        match t {
            Term::Constant(c) => labels.push(Label::Const(c.clone())),
            _ => match seen.iter().position(|s| *s == t) {
                Some(i) => labels.push(Label::Index(i as u32 + 1)),
                None => {
                    seen.push(t);
                    labels.push(Label::Index(seen.len() as u32));
                }
            },
        }
    }
    Atom::new(
        Predicate::shaped(&a.predicate.name, Shape::new(labels)),
        seen.into_iter().cloned().collect(),
    )
}

pub fn unpack_atom(a: &Atom) -> Result<Atom, CanonicalError> {
    let shape = a
        .predicate
        .shape
        .as_ref()
        .ok_or_else(|| CanonicalError::Unshaped(a.to_string()))?;
    if shape.companion_arity() != a.arity() {
        return Err(CanonicalError::ShapeArity {
            atom: a.to_string(),
            got: a.arity(),
            want: shape.companion_arity(),
        });
    }
    let args = shape
        .labels()
        .iter()
        .map(|l| match l {
            Label::Const(c) => Term::Constant(c.clone()),
            Label::Index(i) => a.args[*i as usize - 1].clone(),
        })
        .collect();
    Ok(Atom::new(Predicate::new(&a.predicate.name), args))
}

pub fn unpack_instance(i: &Instance) -> Result<Instance, CanonicalError> {
    i.iter().map(unpack_atom).collect()
}

pub fn canonical_instance(i: &Instance) -> Instance {
    i.iter().map(canonical_atom).collect()
}

fn check_unshaped<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> Result<(), CanonicalError> {
    match atoms.into_iter().find(|a| a.predicate.shape.is_some()) {
        Some(a) => Err(CanonicalError::AlreadyCanonical(a.to_string())),
        None => Ok(()),
    }
}

fn const_names(consts: &BTreeSet<Term>) -> Vec<Arc<str>> {
    consts
        .iter()
        .filter_map(|t| match t {
            Term::Constant(c) => Some(c.clone()),
            _ => None,
        })
        .collect()
}

/// Every assignment of `vars` to constants or classes, classes numbered in
/// order of first use.
fn raw_patterns(vars: &[Term], consts: &[Arc<str>]) -> Vec<SubstitutionPattern> {
    fn go(
        vars: &[Term],
        consts: &[Arc<str>],
        classes: u32,
        acc: &mut Vec<(Term, PatternValue)>,
        out: &mut Vec<SubstitutionPattern>,
    ) {
        let Some((v, rest)) = vars.split_first() else {
            out.push(SubstitutionPattern {
                assignment: acc.clone(),
            });
            return;
        };
        for c in consts {
            acc.push((v.clone(), PatternValue::Const(c.clone())));
            go(rest, consts, classes, acc, out);
            acc.pop();
        }
        for k in 1..=classes + 1 {
            acc.push((v.clone(), PatternValue::Class(k)));
            go(rest, consts, classes.max(k), acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(vars, consts, 0, &mut Vec::new(), &mut out);
    out
}

fn dedup_atoms(atoms: Vec<Atom>) -> Vec<Atom> {
    let mut seen = BTreeSet::new();
    atoms.into_iter().filter(|a| seen.insert(a.clone())).collect()
}

/// `ς(ρ)`: the rule with the pattern applied; repeated body atoms collapse.
pub fn apply_pattern(rule: &Rule, pattern: &SubstitutionPattern) -> Rule {
    Rule {
        id: rule.id.clone(),
        body: dedup_atoms(rule.body.iter().map(|a| pattern.apply(a)).collect()),
        head: pattern.apply(&rule.head),
    }
}

/// `ρ^c`: every atom replaced by its canonical form.
pub fn canonical_rule(rule: &Rule) -> Rule {
    Rule {
        id: rule.id.clone(),
        body: dedup_atoms(rule.body.iter().map(canonical_atom).collect()),
        head: canonical_atom(&rule.head),
    }
}

fn head_marked(rule: &Rule) -> Vec<Atom> {
    let mut atoms = rule.body.clone();
    let mut head = rule.head.clone();
    head.predicate.name = Arc::from(format!("\u{1}{}", head.predicate.name));
    atoms.push(head);
    atoms
}

/// Equal up to renaming of variables, with body atoms taken as a set.
pub fn rules_isomorphic(a: &Rule, b: &Rule) -> bool {
    isomorphic_atoms(&head_marked(a), &head_marked(b))
}

fn rule_key(rule: &Rule) -> (Vec<Predicate>, Predicate) {
    let mut body: Vec<Predicate> = rule.body.iter().map(|a| a.predicate.clone()).collect();
    body.sort();
    (body, rule.head.predicate.clone())
}

/// Safe substitution patterns of `rule` whose canonical rules are pairwise
/// non-isomorphic, with those canonical rules.
pub fn canonical_variants(rule: &Rule, consts: &BTreeSet<Term>) -> Vec<(SubstitutionPattern, Rule)> {
    let uv = rule.universal_in_order();
    let mut kept: Vec<(SubstitutionPattern, Rule)> = Vec::new();
    let mut by_key: BTreeMap<(Vec<Predicate>, Predicate), Vec<usize>> = BTreeMap::new();
    for pat in raw_patterns(&uv, &const_names(consts)) {
        let c = canonical_rule(&apply_pattern(rule, &pat));
        let bucket = by_key.entry(rule_key(&c)).or_default();
        let marked = head_marked(&c);
        if bucket
            .iter()
            .any(|&i| isomorphic_atoms(&head_marked(&kept[i].1), &marked))
        {
            continue;
        }
        bucket.push(kept.len());
        kept.push((pat, c));
    }
    kept
}

pub fn enumerate_safe_patterns(rule: &Rule, consts: &BTreeSet<Term>) -> Vec<SubstitutionPattern> {
    canonical_variants(rule, consts).into_iter().map(|(p, _)| p).collect()
}

/// Patterns over every variable of a conjunction, duplicates up to
/// isomorphism of the canonical conjunction removed.
pub fn query_variants(atoms: &[Atom], consts: &BTreeSet<Term>) -> Vec<(SubstitutionPattern, Vec<Atom>)> {
    let mut vars = Vec::new();
    for t in atoms.iter().flat_map(|a| a.variables()) {
        if !vars.contains(t) {
            vars.push(t.clone());
        }
    }
    let mut kept: Vec<(SubstitutionPattern, Vec<Atom>)> = Vec::new();
    for pat in raw_patterns(&vars, &const_names(consts)) {
        let c = dedup_atoms(atoms.iter().map(|a| canonical_atom(&pat.apply(a))).collect());
        if kept.iter().any(|(_, k)| isomorphic_atoms(k, &c)) {
            continue;
        }
        kept.push((pat, c));
    }
    kept
}

pub fn rewrite_database(db: &Database) -> Result<Database, CanonicalError> {
    check_unshaped(db.iter())?;
    Ok(Database::new(db.iter().map(canonical_atom)).expect("canonical facts are ground"))
}

/// `Σ^c`. Canonical rules are named `<source id>.<k>`; identical rules from
/// different sources are kept apart.
pub fn rewrite_ontology(onto: &Ontology, consts: &BTreeSet<Term>) -> Result<Ontology, CanonicalError> {
    check_unshaped(onto.rules.iter().flat_map(|r| r.atoms()))?;
    let mut rules = Vec::new();
    for r in &onto.rules {
        for (k, (_, mut c)) in canonical_variants(r, consts).into_iter().enumerate() {
            c.id = Arc::from(format!("{}.{}", r.id, k + 1));
            rules.push(c);
        }
    }
    Ok(Ontology::normalized(rules))
}

/// Like [`rewrite_ontology`] but with one canonical rule per pattern and no
/// isomorphism pass. Rules whose bodies agree as sets but list their atoms
/// in a different order are kept apart, so each oblivious trigger of the
/// input has exactly one counterpart.
pub fn rewrite_ontology_all_patterns(onto: &Ontology, consts: &BTreeSet<Term>) -> Result<Ontology, CanonicalError> {
    check_unshaped(onto.rules.iter().flat_map(|r| r.atoms()))?;
    let names = const_names(consts);
    let mut rules = Vec::new();
    for r in &onto.rules {
        for (k, pat) in raw_patterns(&r.universal_in_order(), &names).into_iter().enumerate() {
            let mut c = canonical_rule(&apply_pattern(r, &pat));
            c.id = Arc::from(format!("{}.{}", r.id, k + 1));
            rules.push(c);
        }
    }
    Ok(Ontology::normalized(rules))
}

pub fn rewrite_query(q: &Query, consts: &BTreeSet<Term>) -> Result<Query, CanonicalError> {
    check_unshaped(q.disjuncts.iter().flatten())?;
    let disjuncts = q
        .disjuncts
        .iter()
        .flat_map(|d| query_variants(d, consts).into_iter().map(|(_, c)| c))
        .collect();
    Ok(Query::new(disjuncts).expect("rewritten disjuncts are non-empty"))
}

/// The rewriting of a whole program, using the constants of its database
/// and rules.
#[derive(Clone, Debug)]
pub struct CanonicalProgram {
    pub constants: BTreeSet<Term>,
    pub database: Database,
    pub ontology: Ontology,
    pub queries: Vec<Query>,
}

impl CanonicalProgram {
    pub fn as_program(&self) -> Program {
        Program {
            database: self.database.clone(),
            ontology: self.ontology.clone(),
            queries: self.queries.clone(),
        }
    }
}

pub fn rewrite_program(p: &Program) -> Result<CanonicalProgram, CanonicalError> {
    let constants = constants_of(&p.database, &p.ontology);
    Ok(CanonicalProgram {
        database: rewrite_database(&p.database)?,
        ontology: rewrite_ontology(&p.ontology, &constants)?,
        queries: p
            .queries
            .iter()
            .map(|q| rewrite_query(q, &constants))
            .collect::<Result<_, _>>()?,
        constants,
    })
}

/// Source rule id of a canonical rule id.
pub fn source_rule(id: &str) -> &str {
    id.rsplit_once('.').map_or(id, |(s, _)| s)
}

/// A rule is harmless when some variable occurs in more than one body atom.
pub fn is_harmless(rule: &Rule) -> bool {
    rule.universal_in_order()
        .iter()
        .any(|v| rule.body.iter().filter(|a| a.args.contains(v)).count() > 1)
}

/// `(active, harmless)`.
pub fn partition_active_harmless(onto: &Ontology) -> (Ontology, Ontology) {
    let (harmless, active): (Vec<Rule>, Vec<Rule>) = onto.rules.iter().cloned().partition(is_harmless);
    (Ontology::new(active), Ontology::new(harmless))
}
