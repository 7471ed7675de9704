use std::collections::BTreeSet;

use crate::logic::{Ontology, Term};

use super::ViolationWitness;

/// Marked variables as `(rule index, variable)`.
pub fn sticky_marking(onto: &Ontology) -> BTreeSet<(usize, Term)> {
    let mut marked = BTreeSet::new();
    for (ri, rule) in onto.rules.iter().enumerate() {
        for x in rule.universal_in_order() {
            if !rule.head.args.contains(&x) {
                marked.insert((ri, x));
            }
        }
    }
    loop {
        let mut fresh = Vec::new();
        for (ri, x) in &marked {
            let rule = &onto.rules[*ri];
            for a in &rule.body {
                for (i, t) in a.args.iter().enumerate() {
                    if t != x {
                        continue;
                    }
                    for (rj, other) in onto.rules.iter().enumerate() {
                        if other.head.predicate != a.predicate {
                            continue;
                        }
                        if let Some(y) = other.head.args.get(i).filter(|y| y.is_variable()) {
                            if !marked.contains(&(rj, y.clone())) {
                                fresh.push((rj, y.clone()));
                            }
                        }
                    }
                }
            }
        }
        if fresh.is_empty() {
            return marked;
        }
        marked.extend(fresh);
    }
}

pub fn sticky_violation(onto: &Ontology) -> Option<ViolationWitness> {
    let marked = sticky_marking(onto);
    for (ri, rule) in onto.rules.iter().enumerate() {
        for x in rule.universal_in_order() {
            let count = rule
                .body
                .iter()
                .flat_map(|a| a.args.iter())
                .filter(|t| **t == x)
                .count();
            if count > 1 && marked.contains(&(ri, x.clone())) {
                return Some(ViolationWitness::MarkedJoin {
                    rule: rule.id.to_string(),
                    variable: x,
                });
            }
        }
    }
    None
}
