use std::collections::{BTreeMap, HashMap, HashSet};

use crate::canonical::{is_harmless, partition_active_harmless};
use crate::hom::Matcher;
use crate::logic::{Atom, Instance, Mapping, Ontology, Term};

use super::{
    first_violation, propagation_ordering, AnnotatedAtom, AnnotatedTerm, FiniteModelError, StartingPoint,
    SupportOrdering,
};

const MAX_STEPS: usize = 100_000;

#[derive(Clone, Debug)]
pub struct RepairResult {
    pub instance: Instance,
    /// Maps every fresh null back to the term it was split from, so that
    /// `homomorphism(instance)` lies inside the input model.
    pub homomorphism: Mapping,
    /// Fresh null id to the starting point it renames.
    pub starting_points: BTreeMap<u32, StartingPoint>,
}

struct Repair<'a> {
    model: &'a Instance,
    model_index: HashMap<&'a Atom, usize>,
    items: Vec<AnnotatedAtom>,
    seen: HashSet<AnnotatedAtom>,
    active: BTreeMap<StartingPoint, u32>,
    next_null: u32,
}

impl Repair<'_> {
    fn render_term(&self, t: &AnnotatedTerm) -> Term {
        match t {
            AnnotatedTerm::Plain(t) => t.clone(),
            AnnotatedTerm::Start(sp) => match self.active.get(sp) {
                Some(&n) => Term::null(n),
                None => sp.term.clone(),
            },
        }
    }

    fn render(&self, item: &AnnotatedAtom) -> Atom {
        Atom::new(
            item.predicate.clone(),
            item.args.iter().map(|t| self.render_term(t)).collect(),
        )
    }

    fn rendered(&self) -> (Instance, HashMap<Atom, Vec<usize>>) {
        let mut inst = Instance::new();
        let mut owners: HashMap<Atom, Vec<usize>> = HashMap::new();
        for (i, item) in self.items.iter().enumerate() {
            let a = self.render(item);
            owners.entry(a.clone()).or_default().push(i);
            inst.insert(a);
        }
        (inst, owners)
    }

    /// Back to the input model: fresh nulls to their source terms.
    fn unrename(&self, t: &Term) -> Term {
        if let Term::Null(n) = t {
            if let Some(sp) = self.active.iter().find_map(|(sp, m)| (m == n).then_some(sp)) {
                return sp.term.clone();
            }
        }
        t.clone()
    }

    fn push(&mut self, item: AnnotatedAtom) -> bool {
        if self.seen.insert(item.clone()) {
            self.items.push(item);
            true
        } else {
            false
        }
    }
}

/// Rebuilds a model of a canonical ontology from a support ordering of a
/// model of its active part.
///
/// Atoms are tracked with their propagation annotations. A violated harmless
/// rule is resolved by giving one starting point on a join position a fresh
/// null, which renames every atom it propagated to. A violated active rule
/// is resolved by copying the matching atom of the input model, keeping the
/// annotations of the body and opening new starting points at the
/// existential positions.
pub fn disjoin_repair(
    model: &Instance,
    ordering: &SupportOrdering,
    onto: &Ontology,
) -> Result<RepairResult, FiniteModelError> {
    let (active_part, _) = partition_active_harmless(onto);
    let annotated = propagation_ordering(ordering, &active_part)?;
    let mut st = Repair {
        model,
        model_index: ordering.atoms().enumerate().map(|(i, a)| (a, i)).collect(),
        items: Vec::new(),
        seen: HashSet::new(),
        active: BTreeMap::new(),
        next_null: model.max_null().map_or(1, |n| n + 1),
    };
    for item in annotated {
        st.push(item);
    }

    for _ in 0..MAX_STEPS {
        let (inst, owners) = st.rendered();
        let Some(v) = first_violation(&inst, onto) else {
            let homomorphism = st
                .active
                .iter()
                .map(|(sp, &n)| (Term::null(n), sp.term.clone()))
                .collect();
            let starting_points = st.active.iter().map(|(sp, &n)| (n, sp.clone())).collect();
            return Ok(RepairResult {
                instance: inst,
                homomorphism,
                starting_points,
            });
        };
        let rule = &onto.rules[v.rule];
        let h = &v.mapping;

        if is_harmless(rule) {
            let mut best: Option<(usize, StartingPoint)> = None;
            for x in rule.universal_in_order() {
                for b in rule.body.iter().filter(|b| b.args.contains(&x)) {
                    let image = h.apply_atom(b);
                    for &i in owners.get(&image).into_iter().flatten() {
                        for (l, t) in b.args.iter().enumerate() {
                            if *t != x {
                                continue;
                            }
                            if let AnnotatedTerm::Start(sp) = &st.items[i].args[l] {
                                if !st.active.contains_key(sp) && best.as_ref().is_none_or(|(bi, _)| i < *bi) {
                                    best = Some((i, sp.clone()));
                                }
                            }
                        }
                    }
                }
                if best.is_some() {
                    break;
                }
            }
            let Some((_, sp)) = best else {
                return Err(FiniteModelError::Stuck {
                    rule: rule.id.to_string(),
                    mapping: h.clone(),
                });
            };
            st.active.insert(sp, st.next_null);
            st.next_null += 1;
            continue;
        }

        let (uv, _) = rule.variables_of();
        let mut seed = Mapping::new();
        for x in &uv {
            if let Some(t) = h.get(x) {
                seed.insert(x.clone(), st.unrename(t));
            }
        }
        let beta = Matcher::new(std::slice::from_ref(&rule.head), st.model)
            .first(&seed)
            .map(|g| g.apply_atom(&rule.head))
            .ok_or_else(|| FiniteModelError::NotAModel(rule.id.to_string()))?;
        let jb = st.model_index[&beta] + 1;
        let ev = rule.existential_in_order();
        let mut args = Vec::with_capacity(beta.arity());
        for (k, t) in rule.head.args.iter().enumerate() {
            let ann = if t.is_constant() {
                AnnotatedTerm::Plain(t.clone())
            } else if ev.contains(t) {
                AnnotatedTerm::Start(StartingPoint {
                    term: beta.args[k].clone(),
                    atom: jb,
                    position: k + 1,
                })
            } else {
                let (b, l) = rule
                    .body
                    .iter()
                    .find_map(|b| b.args.iter().position(|s| s == t).map(|l| (b, l)))
                    .expect("head variable occurs in the body");
                let owner = owners[&h.apply_atom(b)][0];
                st.items[owner].args[l].clone()
            };
            args.push(ann);
        }
        let item = AnnotatedAtom {
            predicate: beta.predicate.clone(),
            args,
        };
        if !st.push(item) {
            return Err(FiniteModelError::Stuck {
                rule: rule.id.to_string(),
                mapping: h.clone(),
            });
        }
    }
    Err(FiniteModelError::Budget)
}
