//! Breadth-first oblivious and restricted chase.
//!
//! A round collects every trigger whose body image lies in the instance as
//! it stood when the round began, sorts them by rule order and then by the
//! insertion indices of the body image, and fires them in that order. Nulls
//! come from a single counter per run.

use std::collections::HashSet;
use std::ops::{ControlFlow, Range};

use crate::hom::{satisfies_query, Matcher, Witness};
use crate::logic::{Atom, Database, Instance, Mapping, Ontology, Query, Rule, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChaseMode {
    Oblivious,
    Restricted,
}

#[derive(Clone, Debug)]
pub struct ChaseConfig {
    pub mode: ChaseMode,
    /// Stop once the instance holds this many atoms.
    pub max_atoms: usize,
    /// Stop after this many rounds that produced an atom.
    pub max_rounds: usize,
    /// Only fire triggers that map distinct rule variables to distinct
    /// terms. Used when chasing canonical rewritings, whose rules already
    /// spell out every equality pattern.
    pub injective: bool,
}

impl Default for ChaseConfig {
    fn default() -> Self {
        ChaseConfig {
            mode: ChaseMode::Oblivious,
            max_atoms: 10_000,
            max_rounds: usize::MAX,
            injective: false,
        }
    }
}

impl ChaseConfig {
    pub fn restricted(max_atoms: usize) -> Self {
        ChaseConfig {
            mode: ChaseMode::Restricted,
            max_atoms,
            ..Default::default()
        }
    }

    pub fn oblivious(max_atoms: usize) -> Self {
        ChaseConfig {
            max_atoms,
            ..Default::default()
        }
    }
}

/// One chase step: the rule, the homomorphism extended to the existential
/// variables, and the atom it added.
#[derive(Clone, Debug, PartialEq)]
pub struct ChaseStep {
    pub rule: String,
    pub round: usize,
    pub mapping: Mapping,
    pub atom: Atom,
}

#[derive(Clone, Debug)]
pub struct ChaseResult {
    pub instance: Instance,
    pub steps: Vec<ChaseStep>,
    /// `true` iff a round produced no new atom.
    pub terminated: bool,
    /// Rounds that produced at least one atom.
    pub rounds: usize,
    /// Instance size after each completed round.
    pub round_sizes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Entailment {
    True(Witness),
    False,
    Unknown,
}

impl Entailment {
    pub fn as_str(&self) -> &'static str {
        match self {
            Entailment::True(_) => "true",
            Entailment::False => "false",
            Entailment::Unknown => "unknown",
        }
    }

    pub fn is_definite(&self) -> bool {
        !matches!(self, Entailment::Unknown)
    }
}

/// Pairs already considered, keyed by rule index and body image.
pub type FiredSet = HashSet<(usize, Vec<usize>)>;

#[derive(Clone, Debug)]
struct Trigger {
    rule: usize,
    image: Vec<usize>,
    mapping: Mapping,
}

/// Restricted reading of applicability: some extension of `h` restricted to
/// the universal variables maps the head into `inst`.
pub fn head_satisfied(rule: &Rule, h: &Mapping, inst: &Instance) -> bool {
    let (uv, _) = rule.variables_of();
    let seed = h.restrict(|t| uv.contains(t));
    Matcher::new(std::slice::from_ref(&rule.head), inst)
        .first(&seed)
        .is_some()
}

/// Calls `f` on each trigger not yet fired, stopping when it breaks.
fn visit_triggers(
    onto: &Ontology,
    inst: &Instance,
    fired: &FiredSet,
    delta_start: usize,
    injective: bool,
    f: &mut dyn FnMut(Trigger) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let n = inst.len();
    for (ri, rule) in onto.rules.iter().enumerate() {
        let k = rule.body.len();
        // Atom i ranges over the delta, earlier atoms over the old part and
        // later ones over everything, so each image is produced once.
        for i in 0..k {
            if delta_start > 0
                && inst
                    .with_predicate(&rule.body[i].predicate)
                    .last()
                    .is_none_or(|&l| l < delta_start)
            {
                continue;
            }
            let ranges: Vec<Range<usize>> = (0..k)
                .map(|j| match j.cmp(&i) {
                    std::cmp::Ordering::Less => 0..delta_start,
                    std::cmp::Ordering::Equal => delta_start..n,
                    std::cmp::Ordering::Greater => 0..n,
                })
                .collect();
            Matcher::new(&rule.body, inst)
                .ranges(&ranges)
                .injective(injective)
                .for_each(&Mapping::new(), |m, image| {
                    if fired.contains(&(ri, image.to_vec())) {
                        return ControlFlow::Continue(());
                    }
                    f(Trigger {
                        rule: ri,
                        image: image.to_vec(),
                        mapping: m.clone(),
                    })
                })?;
        }
    }
    ControlFlow::Continue(())
}

fn collect_triggers(
    onto: &Ontology,
    inst: &Instance,
    fired: &FiredSet,
    delta_start: usize,
    injective: bool,
) -> Vec<Trigger> {
    let mut out = Vec::new();
    let _ = visit_triggers(onto, inst, fired, delta_start, injective, &mut |t| {
        out.push(t);
        ControlFlow::Continue(())
    });
    out.sort_by(|a, b| (a.rule, &a.image).cmp(&(b.rule, &b.image)));
    out
}

/// Pairs `(rule, h)` with `h(body) ⊆ inst` that have not fired yet, in
/// firing order. Restricted mode drops pairs whose head is already satisfied.
pub fn applicable_steps(onto: &Ontology, inst: &Instance, fired: &FiredSet, mode: ChaseMode) -> Vec<(Rule, Mapping)> {
    collect_triggers(onto, inst, fired, 0, false)
        .into_iter()
        .filter(|t| mode == ChaseMode::Oblivious || !head_satisfied(&onto.rules[t.rule], &t.mapping, inst))
        .map(|t| (onto.rules[t.rule].clone(), t.mapping))
        .collect()
}

/// Incremental chase state, one round at a time.
pub struct Chase<'a> {
    onto: &'a Ontology,
    cfg: ChaseConfig,
    instance: Instance,
    fired: FiredSet,
    delta_start: usize,
    next_null: u32,
    steps: Vec<ChaseStep>,
    rounds: usize,
    round_sizes: Vec<usize>,
    finished: Option<bool>,
}

impl<'a> Chase<'a> {
    pub fn new(start: Instance, onto: &'a Ontology, cfg: ChaseConfig) -> Self {
        let next_null = start.max_null().map_or(1, |n| n + 1);
        Chase {
            onto,
            cfg,
            instance: start,
            fired: FiredSet::new(),
            delta_start: 0,
            next_null,
            steps: Vec::new(),
            rounds: 0,
            round_sizes: Vec::new(),
            finished: None,
        }
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    /// Completed rounds that produced an atom.
    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// `Some(terminated)` once the run has stopped.
    pub fn finished(&self) -> Option<bool> {
        self.finished
    }

    /// Whether some trigger would still fire.
    fn has_pending(&self) -> bool {
        let restricted = self.cfg.mode == ChaseMode::Restricted;
        visit_triggers(
            self.onto,
            &self.instance,
            &self.fired,
            self.delta_start,
            self.cfg.injective,
            &mut |t| {
                if restricted && head_satisfied(&self.onto.rules[t.rule], &t.mapping, &self.instance) {
                    ControlFlow::Continue(())
                } else {
                    ControlFlow::Break(())
                }
            },
        )
        .is_break()
    }

    /// Runs one round. Returns `false` once the run has stopped.
    pub fn round(&mut self) -> bool {
        if self.finished.is_some() {
            return false;
        }
        if self.instance.len() >= self.cfg.max_atoms {
            self.finished = Some(!self.has_pending());
            return false;
        }
        let triggers = collect_triggers(
            self.onto,
            &self.instance,
            &self.fired,
            self.delta_start,
            self.cfg.injective,
        );
        let before = self.instance.len();
        let round_no = self.rounds + 1;
        for t in triggers {
            let rule = &self.onto.rules[t.rule];
            self.fired.insert((t.rule, t.image.clone()));
            if self.cfg.mode == ChaseMode::Restricted && head_satisfied(rule, &t.mapping, &self.instance) {
                continue;
            }
            let mut h = t.mapping;
            for z in rule.existential_in_order() {
                h.insert(z, Term::null(self.next_null));
                self.next_null += 1;
            }
            let atom = h.apply_atom(&rule.head);
            if self.instance.insert(atom.clone()) {
                self.steps.push(ChaseStep {
                    rule: rule.id.to_string(),
                    round: round_no,
                    mapping: h,
                    atom,
                });
                if self.instance.len() >= self.cfg.max_atoms {
                    self.rounds = round_no;
                    self.finished = Some(false);
                    return false;
                }
            }
        }
        self.delta_start = before;
        if self.instance.len() == before {
            self.finished = Some(true);
            return false;
        }
        self.rounds = round_no;
        self.round_sizes.push(self.instance.len());
        if self.rounds >= self.cfg.max_rounds {
            self.finished = Some(!self.has_pending());
            return false;
        }
        true
    }

    pub fn finish(mut self) -> ChaseResult {
        while self.round() {}
        ChaseResult {
            instance: self.instance,
            steps: self.steps,
            terminated: self.finished == Some(true),
            rounds: self.rounds,
            round_sizes: self.round_sizes,
        }
    }
}

pub fn run_chase(db: &Database, onto: &Ontology, cfg: &ChaseConfig) -> ChaseResult {
    run_chase_from(db.instance().clone(), onto, cfg)
}

/// Chase starting from an arbitrary instance, which may contain nulls.
pub fn run_chase_from(start: Instance, onto: &Ontology, cfg: &ChaseConfig) -> ChaseResult {
    Chase::new(start, onto, cfg.clone()).finish()
}

/// `True` with a witness as soon as a round's instance satisfies `q`;
/// `False` if the chase terminates without a match; `Unknown` if a bound
/// trips first.
pub fn entails(db: &Database, onto: &Ontology, q: &Query, cfg: &ChaseConfig) -> Entailment {
    entails_from(db.instance().clone(), onto, q, cfg)
}

pub fn entails_from(start: Instance, onto: &Ontology, q: &Query, cfg: &ChaseConfig) -> Entailment {
    let mut chase = Chase::new(start, onto, cfg.clone());
    loop {
        if let Some(w) = satisfies_query(chase.instance(), q) {
            return Entailment::True(w);
        }
        if !chase.round() {
            if let Some(w) = satisfies_query(chase.instance(), q) {
                return Entailment::True(w);
            }
            return match chase.finished() {
                Some(true) => Entailment::False,
                _ => Entailment::Unknown,
            };
        }
    }
}

#[cfg(test)]
mod test {
    use super::*;
    use crate::hom::isomorphic;
    use crate::parse::{parse_instance, parse_program};

    const FATHER: &str = "
        person(tim). person(john). fatherOf(tim,john).
        person(X) -> exists Y. fatherOf(Y,X).
        fatherOf(X,Y) -> person(X).
    ";

    #[test]
    fn bounded_father_prefix() {
        let p = parse_program(FATHER).unwrap();
        let res = run_chase(&p.database, &p.ontology, &ChaseConfig::oblivious(9));
        assert!(!res.terminated);
        let want = parse_instance(
            "person(tim). person(john). fatherOf(tim,john).
             fatherOf(_:n1,tim). fatherOf(_:n2,john). person(_:n1). person(_:n2).
             fatherOf(_:n3,_:n1). fatherOf(_:n4,_:n2).",
        )
        .unwrap();
        assert_eq!(res.instance, want);
        assert_eq!(res.steps.len(), 6);
        assert_eq!(res.steps[0].rule, "r1");
    }

    #[test]
    fn first_applicable_steps() {
        let p = parse_program(FATHER).unwrap();
        let steps = applicable_steps(
            &p.ontology,
            p.database.instance(),
            &FiredSet::new(),
            ChaseMode::Oblivious,
        );
        let rules: Vec<&str> = steps.iter().map(|(r, _)| &*r.id).collect();
        assert_eq!(rules, vec!["r1", "r1", "r2"]);
        let restricted = applicable_steps(
            &p.ontology,
            p.database.instance(),
            &FiredSet::new(),
            ChaseMode::Restricted,
        );
        // Only person(tim) lacks a father; fatherOf(tim,john) already yields person(tim).
        assert_eq!(restricted.len(), 1);
        assert_eq!(restricted[0].1.apply(&Term::variable("X#1")), Term::constant("tim"));
    }

    #[test]
    fn datalog_terminates_even_with_repeats() {
        let p = parse_program("e(a,b). e(b,c). e(X,Y) -> t(X,Y). t(X,Y), e(Y,Z) -> t(X,Z).").unwrap();
        let res = run_chase(&p.database, &p.ontology, &ChaseConfig::default());
        assert!(res.terminated);
        assert_eq!(res.instance.len(), 5);
    }

    #[test]
    fn restricted_stops_where_oblivious_does_not() {
        let p = parse_program("r(a,a). r(X,Y) -> exists Z. r(Y,Z).").unwrap();
        let r = run_chase(&p.database, &p.ontology, &ChaseConfig::restricted(100));
        assert!(r.terminated);
        assert_eq!(r.instance.len(), 1);
        let o = run_chase(&p.database, &p.ontology, &ChaseConfig::oblivious(50));
        assert!(!o.terminated);
        assert_eq!(o.instance.len(), 50);
    }

    #[test]
    fn max_rounds_bound() {
        let p = parse_program(FATHER).unwrap();
        let cfg = ChaseConfig {
            max_rounds: 2,
            ..Default::default()
        };
        let res = run_chase(&p.database, &p.ontology, &cfg);
        assert_eq!(res.rounds, 2);
        assert_eq!(res.round_sizes, vec![5, 7]);
        assert!(!res.terminated);
    }

    #[test]
    fn entailment_verdicts() {
        let p = parse_program(&format!("{FATHER} ? person(X), fatherOf(X,tim). ? fatherOf(tim,tim).")).unwrap();
        let cfg = ChaseConfig::oblivious(200);
        assert!(matches!(
            entails(&p.database, &p.ontology, &p.queries[0], &cfg),
            Entailment::True(_)
        ));
        assert_eq!(
            entails(&p.database, &p.ontology, &p.queries[1], &cfg),
            Entailment::Unknown
        );
        let q = parse_program("s(a). s(X) -> exists Y. t(X,Y). ? t(Y,a).").unwrap();
        assert_eq!(
            entails(&q.database, &q.ontology, &q.queries[0], &cfg),
            Entailment::False
        );
    }

    #[test]
    fn every_derived_atom_has_one_step() {
        let p = parse_program(FATHER).unwrap();
        let res = run_chase(&p.database, &p.ontology, &ChaseConfig::oblivious(60));
        let derived: Vec<&Atom> = res
            .instance
            .iter()
            .filter(|a| !p.database.instance().contains(a))
            .collect();
        assert_eq!(derived.len(), res.steps.len());
        for s in &res.steps {
            let rule = p.ontology.rule(&s.rule).unwrap();
            for b in &rule.body {
                assert!(res.instance.contains(&s.mapping.apply_atom(b)));
            }
            assert_eq!(s.mapping.apply_atom(&rule.head), s.atom);
        }
    }

    #[test]
    fn semi_naive_matches_naive_rounds() {
        let p = parse_program(
            "e(a,b). e(b,c). e(c,a). s(a).
             e(X,Y), s(X) -> s(Y).
             s(X) -> exists Z. e(X,Z).
             e(X,Y), e(Y,Z) -> f(X,Z).",
        )
        .unwrap();
        let cfg = ChaseConfig {
            max_rounds: 4,
            ..Default::default()
        };
        let fast = run_chase(&p.database, &p.ontology, &cfg);

        // Naive oracle: recompute every body match against the whole
        // instance each round, skipping pairs already fired.
        let mut inst = p.database.instance().clone();
        let mut fired = FiredSet::new();
        let mut next = 1;
        for _ in 0..4 {
            let snapshot = inst.clone();
            let mut batch = Vec::new();
            for (ri, r) in p.ontology.rules.iter().enumerate() {
                let _ = Matcher::new(&r.body, &snapshot).for_each(&Mapping::new(), |m, img| {
                    if fired.insert((ri, img.to_vec())) {
                        batch.push((ri, img.to_vec(), m.clone()));
                    }
                    ControlFlow::Continue(())
                });
            }
            batch.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
            for (ri, _, mut m) in batch {
                let r = &p.ontology.rules[ri];
                for z in r.existential_in_order() {
                    m.insert(z, Term::null(next));
                    next += 1;
                }
                inst.insert(m.apply_atom(&r.head));
            }
        }
        assert_eq!(fast.instance, inst);
        assert!(isomorphic(&fast.instance, &inst));
    }
}
