//! Syntactic fragments of existential rules.

mod graph;
mod shy;
mod sticky;

use std::collections::BTreeSet;
use std::fmt;

use serde_json::{json, Value};

use crate::logic::{Ontology, Position, Term};

pub use graph::{weak_acyclicity_violation, DependencyGraph, EdgeKind};
pub use shy::{attacked_by, invasion_table, shy_violation, ExistentialVar, InvasionTable};
pub use sticky::{sticky_marking, sticky_violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fragment {
    Datalog,
    InclusionDependencies,
    Linear,
    Guarded,
    Joinless,
    Sticky,
    WeaklyAcyclic,
    Shy,
}

impl Fragment {
    pub const ALL: [Fragment; 8] = [
        Fragment::Datalog,
        Fragment::InclusionDependencies,
        Fragment::Linear,
        Fragment::Guarded,
        Fragment::Joinless,
        Fragment::Sticky,
        Fragment::WeaklyAcyclic,
        Fragment::Shy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Fragment::Datalog => "datalog",
            Fragment::InclusionDependencies => "inclusion-dependencies",
            Fragment::Linear => "linear",
            Fragment::Guarded => "guarded",
            Fragment::Joinless => "joinless",
            Fragment::Sticky => "sticky",
            Fragment::WeaklyAcyclic => "weakly-acyclic",
            Fragment::Shy => "shy",
        }
    }
}

/// Why an ontology falls outside a fragment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationWitness {
    Existential {
        rule: String,
        variables: Vec<Term>,
    },
    NonSimpleAtom {
        rule: String,
        atom: String,
    },
    BodySize {
        rule: String,
        size: usize,
    },
    NoGuard {
        rule: String,
    },
    RepeatedBodyVariable {
        rule: String,
        variable: Term,
    },
    NonSimpleHead {
        rule: String,
    },
    MarkedJoin {
        rule: String,
        variable: Term,
    },
    SpecialCycle {
        cycle: Vec<Position>,
    },
    ShyJoin {
        rule: String,
        variable: Term,
        attacker: ExistentialVar,
        positions: Vec<Position>,
    },
    ShyPair {
        rule: String,
        first: Term,
        second: Term,
        attacker: ExistentialVar,
        positions: Vec<Position>,
    },
}

impl ViolationWitness {
    pub fn rule(&self) -> Option<&str> {
        match self {
            ViolationWitness::SpecialCycle { .. } => None,
            ViolationWitness::Existential { rule, .. }
            | ViolationWitness::NonSimpleAtom { rule, .. }
            | ViolationWitness::BodySize { rule, .. }
            | ViolationWitness::NoGuard { rule }
            | ViolationWitness::RepeatedBodyVariable { rule, .. }
            | ViolationWitness::NonSimpleHead { rule }
            | ViolationWitness::MarkedJoin { rule, .. }
            | ViolationWitness::ShyJoin { rule, .. }
            | ViolationWitness::ShyPair { rule, .. } => Some(rule),
        }
    }
}

fn join<T: fmt::Display>(items: &[T], sep: &str) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

impl fmt::Display for ViolationWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationWitness::Existential { rule, variables } => {
                write!(f, "{rule}: existential variables {}", join(variables, ","))
            }
            ViolationWitness::NonSimpleAtom { rule, atom } => write!(f, "{rule}: atom {atom} repeats a term"),
            ViolationWitness::BodySize { rule, size } => write!(f, "{rule}: body has {size} atoms"),
            ViolationWitness::NoGuard { rule } => write!(f, "{rule}: no body atom holds every body variable"),
            ViolationWitness::RepeatedBodyVariable { rule, variable } => {
                write!(f, "{rule}: variable {variable} repeats in the body")
            }
            ViolationWitness::NonSimpleHead { rule } => write!(f, "{rule}: head repeats a term"),
            ViolationWitness::MarkedJoin { rule, variable } => {
                write!(f, "{rule}: marked variable {variable} occurs more than once in the body")
            }
            ViolationWitness::SpecialCycle { cycle } => write!(f, "cycle through a special edge: {}", join(cycle, " -> ")),
            ViolationWitness::ShyJoin { rule, variable, attacker, positions } => write!(
                f,
                "{rule}: join variable {variable} is attacked by {attacker} (positions {})",
                join(positions, ", ")
            ),
            ViolationWitness::ShyPair { rule, first, second, attacker, positions } => write!(
                f,
                "{rule}: head variables {first} and {second} from different body atoms are both attacked by {attacker} (positions {})",
                join(positions, ", ")
            ),
        }
    }
}

/// Membership verdict for every fragment, in [`Fragment::ALL`] order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FragmentReport {
    pub verdicts: Vec<(Fragment, Option<ViolationWitness>)>,
}

impl FragmentReport {
    pub fn is(&self, fragment: Fragment) -> bool {
        self.witness(fragment).is_none()
    }

    pub fn witness(&self, fragment: Fragment) -> Option<&ViolationWitness> {
        self.verdicts
            .iter()
            .find(|(f, _)| *f == fragment)
            .and_then(|(_, w)| w.as_ref())
    }

    pub fn members(&self) -> Vec<Fragment> {
        self.verdicts
            .iter()
            .filter(|(_, w)| w.is_none())
            .map(|(f, _)| *f)
            .collect()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.verdicts
                .iter()
                .map(|(f, w)| {
                    json!({
                        "fragment": f.name(),
                        "member": w.is_none(),
                        "rule": w.as_ref().and_then(|w| w.rule()),
                        "witness": w.as_ref().map(|w| w.to_string()),
                    })
                })
                .collect(),
        )
    }
}

impl fmt::Display for FragmentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<24} {:<7} witness", "fragment", "member")?;
        for (frag, w) in &self.verdicts {
            let member = if w.is_none() { "yes" } else { "no" };
            let why = w.as_ref().map(|w| w.to_string()).unwrap_or_default();
            writeln!(f, "{:<24} {:<7} {}", frag.name(), member, why)?;
        }
        Ok(())
    }
}

pub fn classify(onto: &Ontology) -> FragmentReport {
    let verdicts = Fragment::ALL.iter().map(|&f| (f, violation(onto, f))).collect();
    FragmentReport { verdicts }
}

pub fn is_member(onto: &Ontology, fragment: Fragment) -> bool {
    violation(onto, fragment).is_none()
}

pub fn violation(onto: &Ontology, fragment: Fragment) -> Option<ViolationWitness> {
    match fragment {
        Fragment::Datalog => onto.rules.iter().find_map(|r| {
            let ev = r.existential_in_order();
            (!ev.is_empty()).then(|| ViolationWitness::Existential {
                rule: r.id.to_string(),
                variables: ev,
            })
        }),
        Fragment::InclusionDependencies => onto.rules.iter().find_map(|r| {
            if r.body.len() != 1 {
                return Some(ViolationWitness::BodySize {
                    rule: r.id.to_string(),
                    size: r.body.len(),
                });
            }
            r.atoms()
                .find(|a| !a.is_simple())
                .map(|a| ViolationWitness::NonSimpleAtom {
                    rule: r.id.to_string(),
                    atom: a.to_string(),
                })
        }),
        Fragment::Linear => onto.rules.iter().find_map(|r| {
            (r.body.len() != 1).then(|| ViolationWitness::BodySize {
                rule: r.id.to_string(),
                size: r.body.len(),
            })
        }),
        Fragment::Guarded => onto.rules.iter().find_map(|r| {
            let uv: BTreeSet<Term> = r.universal_in_order().into_iter().collect();
            let guarded = r.body.iter().any(|a| uv.iter().all(|v| a.args.contains(v)));
            (!guarded).then(|| ViolationWitness::NoGuard { rule: r.id.to_string() })
        }),
        Fragment::Joinless => onto.rules.iter().find_map(|r| {
            if !r.head.is_simple() {
                return Some(ViolationWitness::NonSimpleHead { rule: r.id.to_string() });
            }
            let mut seen = BTreeSet::new();
            r.body
                .iter()
                .flat_map(|a| a.variables())
                .find(|v| !seen.insert(*v))
                .map(|v| ViolationWitness::RepeatedBodyVariable {
                    rule: r.id.to_string(),
                    variable: v.clone(),
                })
        }),
        Fragment::Sticky => sticky_violation(onto),
        Fragment::WeaklyAcyclic => weak_acyclicity_violation(onto),
        Fragment::Shy => shy_violation(onto),
    }
}

#[cfg(test)]
mod test {
    use super::*;
    use crate::logic::Predicate;
    use crate::parse::parse_program;

    fn onto(s: &str) -> Ontology {
        parse_program(s).unwrap().ontology
    }

    const APPENDIX: &str = "
        s(X1) -> exists Y1. p(X1,Y1).
        p(X2,Y2), u(Y2) -> r(X2,Y2).
        t(X3) -> exists Y3. u(Y3).
    ";
    const RHO4: &str = "u(X4) -> exists Y4. p(Y4,X4).";
    const RHO5_6: &str = "u(X5) -> exists Y5. p(X5,Y5). r(X6,X6) -> v(X6).";

    fn pos(p: &str, i: usize) -> Position {
        Position::new(Predicate::new(p), i)
    }

    #[test]
    fn appendix_is_shy() {
        let o = onto(APPENDIX);
        assert!(is_member(&o, Fragment::Shy));
        let table = invasion_table(&o);
        let names = |p: Position| table.invaders(&p).iter().map(|z| z.to_string()).collect::<Vec<_>>();
        assert_eq!(names(pos("p", 2)), vec!["Y1"]);
        assert_eq!(names(pos("u", 1)), vec!["Y3"]);
        assert!(names(pos("p", 1)).is_empty());
    }

    #[test]
    fn adding_rho4_breaks_the_join_condition() {
        let o = onto(&format!("{APPENDIX}{RHO4}"));
        let w = violation(&o, Fragment::Shy).unwrap();
        match &w {
            ViolationWitness::ShyJoin {
                rule,
                variable,
                attacker,
                ..
            } => {
                assert_eq!(rule, "r2");
                assert_eq!(variable.to_string(), "Y2");
                assert_eq!(attacker.to_string(), "Y3");
            }
            other => panic!("unexpected witness {other}"),
        }
    }

    #[test]
    fn adding_rho5_rho6_breaks_the_pair_condition() {
        let o = onto(&format!("{APPENDIX}{RHO5_6}"));
        let w = violation(&o, Fragment::Shy).unwrap();
        match &w {
            ViolationWitness::ShyPair {
                rule,
                first,
                second,
                attacker,
                ..
            } => {
                assert_eq!(rule, "r2");
                assert_eq!((first.to_string(), second.to_string()), ("X2".into(), "Y2".into()));
                assert_eq!(attacker.to_string(), "Y3");
            }
            other => panic!("unexpected witness {other}"),
        }
        // The join variable itself stays protected.
        let table = invasion_table(&o);
        let r2 = &o.rules[1];
        assert!(attacked_by(&table, r2, &r2.body[0].args[1]).is_empty());
    }

    #[test]
    fn linear_but_not_sticky() {
        let o = onto("p(X,X) -> r(X). r(X) -> exists Y. r(Y).");
        let rep = classify(&o);
        assert!(rep.is(Fragment::Linear));
        assert!(!rep.is(Fragment::Sticky));
        assert!(!rep.is(Fragment::InclusionDependencies));
        let marked = sticky_marking(&o);
        assert_eq!(marked.len(), 3);
        assert_eq!(rep.witness(Fragment::Sticky).unwrap().rule(), Some("r1"));
    }

    #[test]
    fn father_theory_fragments() {
        let o = onto("person(X) -> exists Y. fatherOf(Y,X). fatherOf(X,Y) -> person(X).");
        let rep = classify(&o);
        assert_eq!(
            rep.members(),
            vec![
                Fragment::InclusionDependencies,
                Fragment::Linear,
                Fragment::Guarded,
                Fragment::Joinless,
                Fragment::Sticky,
                Fragment::Shy
            ]
        );
        match rep.witness(Fragment::WeaklyAcyclic).unwrap() {
            ViolationWitness::SpecialCycle { cycle } => {
                assert_eq!(cycle.first(), cycle.last());
                assert!(cycle.contains(&pos("person", 1)));
                assert!(cycle.contains(&pos("fatherOf", 1)));
            }
            other => panic!("unexpected witness {other}"),
        }
    }

    #[test]
    fn guard_and_joinless() {
        let o = onto("p(X,Y), q(Y,Z) -> r(X,Z).");
        let rep = classify(&o);
        assert!(!rep.is(Fragment::Guarded));
        assert!(!rep.is(Fragment::Joinless));
        assert!(rep.is(Fragment::Datalog));
        assert!(rep.is(Fragment::WeaklyAcyclic));
        assert!(rep.is(Fragment::Shy));
        let o = onto("p(X,Y,Z), q(Y) -> r(X).");
        assert!(is_member(&o, Fragment::Guarded));
    }

    /// Transitive closure by matrix squaring; a special edge (u,v) lies on a
    /// cycle iff v reaches u.
    fn weakly_acyclic_oracle(o: &Ontology) -> bool {
        let g = DependencyGraph::build(o);
        let nodes: Vec<&Position> = g
            .edges
            .iter()
            .flat_map(|(a, b, _)| [a, b])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let idx = |p: &Position| nodes.iter().position(|q| *q == p).unwrap();
        let n = nodes.len();
        let mut reach = vec![vec![false; n]; n];
        for (a, b, _) in &g.edges {
            reach[idx(a)][idx(b)] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    reach[i][j] = reach[i][j] || (reach[i][k] && reach[k][j]);
                }
            }
        }
        !g.edges
            .iter()
            .any(|(a, b, k)| *k == EdgeKind::Special && (a == b || reach[idx(b)][idx(a)]))
    }

    #[test]
    fn weak_acyclicity_agrees_with_closure_oracle() {
        for src in [
            "person(X) -> exists Y. fatherOf(Y,X). fatherOf(X,Y) -> person(X).",
            "p(X) -> exists Y. q(X,Y). q(X,Y) -> r(Y).",
            "p(X) -> exists Y. q(X,Y). q(X,Y) -> p(Y).",
            "e(X,Y) -> exists Z. e(Y,Z).",
            "a(X) -> b(X). b(X) -> exists Y. c(X,Y). c(X,Y) -> a(X).",
            APPENDIX,
        ] {
            let o = onto(src);
            assert_eq!(
                is_member(&o, Fragment::WeaklyAcyclic),
                weakly_acyclic_oracle(&o),
                "{src}"
            );
        }
    }

    #[test]
    fn report_json_and_table() {
        let rep = classify(&onto(APPENDIX));
        let v = rep.to_json();
        assert_eq!(v.as_array().unwrap().len(), 8);
        assert_eq!(v[7]["fragment"], "shy");
        assert_eq!(v[7]["member"], true);
        assert!(rep.to_string().contains("weakly-acyclic"));
    }
}
