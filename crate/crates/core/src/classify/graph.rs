use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::logic::{Ontology, Position};

use super::shy::body_positions;
use super::ViolationWitness;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeKind {
    Plain,
    Special,
}

/// Position dependency graph used by weak acyclicity.
#[derive(Clone, Debug, Default)]
pub struct DependencyGraph {
    pub edges: BTreeSet<(Position, Position, EdgeKind)>,
}

impl DependencyGraph {
    pub fn build(onto: &Ontology) -> Self {
        let mut edges = BTreeSet::new();
        for rule in &onto.rules {
            let ev = rule.existential_in_order();
            for x in rule.universal_in_order() {
                let heads: Vec<Position> = rule
                    .head
                    .args
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| **t == x)
                    .map(|(i, _)| rule.head.position(i))
                    .collect();
                if heads.is_empty() {
                    continue;
                }
                for p in body_positions(rule, &x) {
                    for q in &heads {
                        edges.insert((p.clone(), q.clone(), EdgeKind::Plain));
                    }
                    for (i, t) in rule.head.args.iter().enumerate() {
                        if ev.contains(t) {
                            edges.insert((p.clone(), rule.head.position(i), EdgeKind::Special));
                        }
                    }
                }
            }
        }
        DependencyGraph { edges }
    }

    fn successors(&self) -> BTreeMap<&Position, Vec<&Position>> {
        let mut out: BTreeMap<&Position, Vec<&Position>> = BTreeMap::new();
        for (a, b, _) in &self.edges {
            out.entry(a).or_default().push(b);
        }
        out
    }

    /// A cycle through a special edge, as the list of positions visited
    /// (first and last coincide).
    pub fn special_cycle(&self) -> Option<Vec<Position>> {
        let succ = self.successors();
        for (u, v, kind) in &self.edges {
            if *kind != EdgeKind::Special {
                continue;
            }
            let mut prev: BTreeMap<&Position, &Position> = BTreeMap::new();
            let mut queue = VecDeque::from([v]);
            let mut seen = BTreeSet::from([v]);
            while let Some(n) = queue.pop_front() {
                if n == u {
                    let mut back = vec![n];
                    let mut cur = n;
                    while cur != v {
                        cur = prev[cur];
                        back.push(cur);
                    }
                    let mut path = vec![u.clone()];
                    path.extend(back.into_iter().rev().cloned());
                    return Some(path);
                }
                for m in succ.get(n).into_iter().flatten() {
                    if seen.insert(m) {
                        prev.insert(m, n);
                        queue.push_back(m);
                    }
                }
            }
        }
        None
    }
}

pub fn weak_acyclicity_violation(onto: &Ontology) -> Option<ViolationWitness> {
    DependencyGraph::build(onto)
        .special_cycle()
        .map(|cycle| ViolationWitness::SpecialCycle { cycle })
}
