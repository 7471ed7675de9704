//! Invasion of positions by existential variables, and the shy conditions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::logic::{Ontology, Position, Rule, Term};

use super::ViolationWitness;

/// An existential variable, identified by its rule.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ExistentialVar {
    pub rule: String,
    pub var: Term,
}

impl fmt::Display for ExistentialVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.var)
    }
}

/// Positions mapped to the existential variables invading them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InvasionTable {
    pub invaded: BTreeMap<Position, BTreeSet<ExistentialVar>>,
}

impl InvasionTable {
    pub fn invaders(&self, p: &Position) -> BTreeSet<ExistentialVar> {
        self.invaded.get(p).cloned().unwrap_or_default()
    }

    /// Variables invading every position in `positions`.
    pub fn common_invaders<'a>(&self, mut positions: impl Iterator<Item = &'a Position>) -> BTreeSet<ExistentialVar> {
        let Some(first) = positions.next() else {
            return BTreeSet::new();
        };
        let mut acc = self.invaders(first);
        for p in positions {
            let here = self.invaders(p);
            acc.retain(|z| here.contains(z));
            if acc.is_empty() {
                break;
            }
        }
        acc
    }
}

pub(crate) fn body_positions(rule: &Rule, var: &Term) -> Vec<Position> {
    rule.body
        .iter()
        .flat_map(|a| {
            a.args
                .iter()
                .enumerate()
                .filter(|(_, t)| *t == var)
                .map(|(i, _)| a.position(i))
        })
        .collect()
}

pub fn invasion_table(onto: &Ontology) -> InvasionTable {
    let mut table = InvasionTable::default();
    loop {
        let mut changed = false;
        for rule in &onto.rules {
            let (uv, _) = rule.variables_of();
            for (i, t) in rule.head.args.iter().enumerate() {
                if !t.is_variable() {
                    continue;
                }
                let incoming: BTreeSet<ExistentialVar> = if uv.contains(t) {
                    table.common_invaders(body_positions(rule, t).iter())
                } else {
                    [ExistentialVar {
                        rule: rule.id.to_string(),
                        var: t.clone(),
                    }]
                    .into()
                };
                if incoming.is_empty() {
                    continue;
                }
                let slot = table.invaded.entry(rule.head.position(i)).or_default();
                for z in incoming {
                    changed |= slot.insert(z);
                }
            }
        }
        if !changed {
            return table;
        }
    }
}

/// Existential variables attacking `var` in the body of `rule`: those
/// invading every body position where it occurs.
pub fn attacked_by(table: &InvasionTable, rule: &Rule, var: &Term) -> BTreeSet<ExistentialVar> {
    table.common_invaders(body_positions(rule, var).iter())
}

/// First violation of the shy conditions, rules in order, the join
/// condition checked before the head-pair condition.
///
/// The head-pair condition looks at the occurrences of each variable inside
/// the particular body atom it is taken from: two head variables taken from
/// different body atoms must not have all those occurrences invaded by one
/// common existential variable.
pub fn shy_violation(onto: &Ontology) -> Option<ViolationWitness> {
    let table = invasion_table(onto);
    for rule in &onto.rules {
        let uv = rule.universal_in_order();
        for x in &uv {
            let atoms = rule.body.iter().filter(|a| a.args.contains(x)).count();
            if atoms > 1 {
                let attackers = attacked_by(&table, rule, x);
                if let Some(z) = attackers.into_iter().next() {
                    return Some(ViolationWitness::ShyJoin {
                        rule: rule.id.to_string(),
                        variable: x.clone(),
                        attacker: z,
                        positions: body_positions(rule, x),
                    });
                }
            }
        }
        let head_vars: Vec<&Term> = uv.iter().filter(|v| rule.head.args.contains(v)).collect();
        for (xi, x) in head_vars.iter().enumerate() {
            for y in &head_vars[xi + 1..] {
                for (ai, a) in rule.body.iter().enumerate() {
                    for (bi, b) in rule.body.iter().enumerate() {
                        if ai == bi || !a.args.contains(x) || !b.args.contains(y) {
                            continue;
                        }
                        let px: Vec<Position> = a
                            .args
                            .iter()
                            .enumerate()
                            .filter(|(_, t)| t == x)
                            .map(|(i, _)| a.position(i))
                            .collect();
                        let py: Vec<Position> = b
                            .args
                            .iter()
                            .enumerate()
                            .filter(|(_, t)| t == y)
                            .map(|(i, _)| b.position(i))
                            .collect();
                        let common = table.common_invaders(px.iter().chain(py.iter()));
                        if let Some(z) = common.into_iter().next() {
                            return Some(ViolationWitness::ShyPair {
                                rule: rule.id.to_string(),
                                first: (*x).clone(),
                                second: (*y).clone(),
                                attacker: z,
                                positions: px.into_iter().chain(py).collect(),
                            });
                        }
                    }
                }
            }
        }
    }
    None
}
