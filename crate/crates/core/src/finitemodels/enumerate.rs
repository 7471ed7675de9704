use std::collections::{BTreeSet, HashSet};
use std::ops::ControlFlow;

use crate::hom::{isomorphic, satisfies_query, Matcher};
use crate::logic::{constants_of, Atom, Database, Instance, Mapping, Ontology, Query, Term};

use super::first_violation;

/// Limits for the finite model search. `max_extra_nulls` and `max_atoms`
/// bound every candidate model; `max_nodes` caps the search itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_extra_nulls: usize,
    pub max_atoms: usize,
    pub max_nodes: usize,
}

impl Budget {
    pub fn new(max_extra_nulls: usize, max_atoms: usize) -> Self {
        Budget {
            max_extra_nulls,
            max_atoms,
            max_nodes: 200_000,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Enumeration {
    pub models: Vec<Instance>,
    /// False when `max_nodes` was hit, in which case `models` may be partial.
    pub complete: bool,
}

struct Search<'a> {
    onto: &'a Ontology,
    budget: Budget,
    consts: Vec<Term>,
    visited: HashSet<Vec<Atom>>,
    nodes: usize,
    exhausted: bool,
}

impl<'a> Search<'a> {
    fn new(db: &Database, onto: &'a Ontology, budget: Budget) -> Self {
        Search {
            onto,
            budget,
            consts: constants_of(db, onto).into_iter().collect(),
            visited: HashSet::new(),
            nodes: 0,
            exhausted: false,
        }
    }

    /// Depth-first over the first violation of each node. Every way of
    /// satisfying it within budget is a child: existentials range over the
    /// known terms plus fresh nulls.
    fn run(
        &mut self,
        inst: Instance,
        prune: &dyn Fn(&Instance) -> bool,
        on_model: &mut dyn FnMut(&Instance) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        self.nodes += 1;
        if self.nodes > self.budget.max_nodes {
            self.exhausted = true;
            return ControlFlow::Break(());
        }
        if !self.visited.insert(inst.sorted()) || prune(&inst) {
            return ControlFlow::Continue(());
        }
        let Some(v) = first_violation(&inst, self.onto) else {
            return on_model(&inst);
        };
        if inst.len() >= self.budget.max_atoms {
            return ControlFlow::Continue(());
        }
        let rule = &self.onto.rules[v.rule];
        let ev = rule.existential_in_order();
        let mut known: Vec<Term> = inst.terms().into_iter().collect();
        for c in &self.consts {
            if !known.contains(c) {
                known.push(c.clone());
            }
        }
        let nulls = inst.nulls().len();
        let next = inst.max_null().map_or(1, |n| n + 1);
        let mut children = Vec::new();
        assignments(
            &ev,
            0,
            &v.mapping,
            &known,
            next,
            self.budget.max_extra_nulls.saturating_sub(nulls),
            &mut |m| {
                children.push(m.apply_atom(&rule.head));
            },
        );
        for atom in children {
            let mut child = inst.clone();
            child.insert(atom);
            self.run(child, prune, on_model)?;
        }
        ControlFlow::Continue(())
    }
}

fn assignments(
    ev: &[Term],
    i: usize,
    m: &Mapping,
    known: &[Term],
    next: u32,
    fresh_left: usize,
    out: &mut dyn FnMut(&Mapping),
) {
    if i == ev.len() {
        out(m);
        return;
    }
    let mut extended = known.to_vec();
    // Fresh nulls introduced for earlier existentials are also reusable.
    let used: BTreeSet<Term> = ev[..i].iter().filter_map(|e| m.get(e)).cloned().collect();
    for t in used {
        if !extended.contains(&t) {
            extended.push(t);
        }
    }
    for t in &extended {
        let mut m2 = m.clone();
        m2.insert(ev[i].clone(), t.clone());
        assignments(ev, i + 1, &m2, known, next, fresh_left, out);
    }
    if fresh_left > 0 {
        let mut m2 = m.clone();
        m2.insert(ev[i].clone(), Term::null(next));
        assignments(ev, i + 1, &m2, known, next + 1, fresh_left - 1, out);
    }
}

/// Every model reached by the search, without the minimality filter.
pub fn enumerate_models(db: &Database, onto: &Ontology, budget: Budget) -> Enumeration {
    let mut search = Search::new(db, onto, budget);
    let mut models = Vec::new();
    let _ = search.run(db.instance().clone(), &|_| false, &mut |m| {
        models.push(m.clone());
        ControlFlow::Continue(())
    });
    Enumeration {
        models,
        complete: !search.exhausted,
    }
}

/// Subset-minimal models within budget, one per isomorphism class.
pub fn enumerate_finite_models(db: &Database, onto: &Ontology, budget: Budget) -> Enumeration {
    let all = enumerate_models(db, onto, budget);
    let mut models: Vec<Instance> = Vec::new();
    for m in all.models {
        if is_minimal_model(&m, db, onto) && !models.iter().any(|k| isomorphic(k, &m)) {
            models.push(m);
        }
    }
    Enumeration {
        models,
        complete: all.complete,
    }
}

/// A model within budget that does not satisfy `q`. Branches are cut as
/// soon as they satisfy `q`, since adding atoms keeps it satisfied.
pub fn find_finite_countermodel(db: &Database, onto: &Ontology, q: &Query, budget: Budget) -> Option<Instance> {
    let mut search = Search::new(db, onto, budget);
    let mut found = None;
    let _ = search.run(db.instance().clone(), &|i| satisfies_query(i, q).is_some(), &mut |m| {
        found = Some(m.clone());
        ControlFlow::Break(())
    });
    found
}

/// Whether some model of `db` and `onto` sits inside `allowed`.
pub fn has_submodel(db: &Database, onto: &Ontology, allowed: &Instance) -> bool {
    if !db.iter().all(|a| allowed.contains(a)) {
        return false;
    }
    let mut visited = HashSet::new();
    submodel(db.instance().clone(), onto, allowed, &mut visited)
}

fn submodel(inst: Instance, onto: &Ontology, allowed: &Instance, visited: &mut HashSet<Vec<Atom>>) -> bool {
    if !visited.insert(inst.sorted()) {
        return false;
    }
    let Some(v) = first_violation(&inst, onto) else {
        return true;
    };
    let rule = &onto.rules[v.rule];
    let (uv, _) = rule.variables_of();
    let seed = v.mapping.restrict(|t| uv.contains(t));
    let options = Matcher::new(std::slice::from_ref(&rule.head), allowed).all(&seed);
    options.into_iter().any(|g| {
        let mut child = inst.clone();
        child.insert(g.apply_atom(&rule.head));
        submodel(child, onto, allowed, visited)
    })
}

/// No proper subset of `inst` containing the database is a model.
pub fn is_minimal_model(inst: &Instance, db: &Database, onto: &Ontology) -> bool {
    inst.iter().filter(|a| !db.instance().contains(a)).all(|a| {
        let rest: Instance = inst.iter().filter(|b| *b != a).cloned().collect();
        !has_submodel(db, onto, &rest)
    })
}
