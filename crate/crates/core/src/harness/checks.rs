use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::canonical::{
    is_harmless, partition_active_harmless, rewrite_program, rules_isomorphic, unpack_instance, CanonicalProgram,
};
use crate::chase::{entails, run_chase, Chase, ChaseConfig, ChaseMode, Entailment};
use crate::classify::{classify, is_member, violation, Fragment, ViolationWitness};
use crate::finitemodels::{
    check_ordering, disjoin_repair, enumerate_models, find_finite_countermodel, find_support_ordering,
    is_minimal_model, is_model, propagation_ordering, well_supported_core, AnnotatedTerm, Budget, StartingPoint,
};
use crate::hom::{isomorphic, isomorphic_atoms, satisfies_query};
use crate::logic::{Atom, Instance, Ontology, Program, Term};
use crate::parse::{parse_instance, parse_program, print_program};

use super::{paper_theory, NamedProgram};

/// Chase prefixes are compared once they hold this many atoms.
pub const PREFIX_ATOMS: usize = 100;
/// Atom bound for the restricted chase on curated theories.
pub const CHASE_LIMIT: usize = 500;
/// Finite-model budget for curated theories.
pub const MODEL_BUDGET: (usize, usize) = (2, 12);
/// Theories whose chase overshoots this bound inside one round are skipped.
const ROUND_CAP: usize = 40_000;
const MAX_DUMPS: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub id: u8,
    pub name: &'static str,
    pub cases: usize,
    pub skipped: usize,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
    /// Set when the check has a pass condition beyond "no failures".
    pub extra_failed: bool,
}

impl CheckReport {
    fn new(id: u8, name: &'static str) -> Self {
        CheckReport {
            id,
            name,
            cases: 0,
            skipped: 0,
            failures: Vec::new(),
            notes: Vec::new(),
            extra_failed: false,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && !self.extra_failed
    }

    fn absorb(&mut self, outcomes: Vec<Outcome>) {
        for o in outcomes {
            match o {
                Outcome::Pass => self.cases += 1,
                Outcome::Skip(why) => {
                    self.skipped += 1;
                    if self.notes.len() < MAX_DUMPS {
                        self.notes.push(format!("skipped: {why}"));
                    }
                }
                Outcome::Fail(why) => {
                    self.cases += 1;
                    self.failures.push(why);
                }
            }
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "name": self.name,
            "passed": self.passed(),
            "cases": self.cases,
            "skipped": self.skipped,
            "failures": self.failures,
            "notes": self.notes,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Outcome {
    Pass,
    Skip(String),
    Fail(String),
}

fn dump(name: &str, p: &Program) -> String {
    let text = print_program(p);
    let text: String = text.lines().take(40).collect::<Vec<_>>().join("\n");
    format!("theory {name}:\n{text}")
}

fn rewrite(p: &Program) -> Result<CanonicalProgram, String> {
    rewrite_program(p).map_err(|e| e.to_string())
}

const FATHER_CANONICAL: &str = "
    p_[c1] -> exists Y. f_[1,c1](Y).
    p_[c2] -> exists Y. f_[1,c2](Y).
    p_[1](X) -> exists Y. f_[1,2](Y,X).
    f_[c1,c1] -> p_[c1].
    f_[c1,c2] -> p_[c1].
    f_[c2,c1] -> p_[c2].
    f_[c2,c2] -> p_[c2].
    f_[c1,1](Y) -> p_[c1].
    f_[c2,1](Y) -> p_[c2].
    f_[1,c1](X) -> p_[1](X).
    f_[1,c2](X) -> p_[1](X).
    f_[1,1](X) -> p_[1](X).
    f_[1,2](X,Y) -> p_[1](X).
    ? p_[c1], f_[c1,c1] | p_[c2], f_[c2,c1] | p_[1](X), f_[1,c1](X).
";

/// Rewriting of the person/fatherOf theory against the printed table.
pub fn golden_rewriting() -> CheckReport {
    let mut r = CheckReport::new(1, "golden rewriting");
    let p = parse_program(paper_theory("father").unwrap()).unwrap();
    let c = match rewrite(&p) {
        Ok(c) => c,
        Err(e) => {
            r.failures.push(e);
            return r;
        }
    };
    let want = parse_program(FATHER_CANONICAL).unwrap();
    r.cases += 1;
    if c.ontology.len() != 13 {
        r.failures
            .push(format!("expected 13 canonical rules, got {}", c.ontology.len()));
    }
    let mut used = HashSet::new();
    for w in &want.ontology.rules {
        match c
            .ontology
            .rules
            .iter()
            .enumerate()
            .find(|(i, g)| !used.contains(i) && rules_isomorphic(g, w))
        {
            Some((i, _)) => {
                used.insert(i);
            }
            None => r.failures.push(format!("no canonical rule matches {w}")),
        }
    }
    r.cases += 1;
    let dc = parse_instance("p_[c1]. p_[c2]. f_[c1,c2].").unwrap();
    if *c.database.instance() != dc {
        r.failures
            .push(format!("canonical database is {}", c.database.instance()));
    }
    r.cases += 1;
    let got = &c.queries[0].disjuncts;
    let wanted = &want.queries[0].disjuncts;
    let matched = got.len() == wanted.len() && wanted.iter().all(|w| got.iter().any(|g| isomorphic_atoms(g, w)));
    if !matched {
        r.failures.push(format!("rewritten query is {}", c.queries[0]));
    }
    r
}

/// Fragment verdicts on the appendix ontologies and the linear, non-sticky
/// example.
pub fn golden_classification() -> CheckReport {
    let mut r = CheckReport::new(2, "golden classification");
    let onto = |name| parse_program(paper_theory(name).unwrap()).unwrap().ontology;
    r.cases += 1;
    if !is_member(&onto("shy_appendix"), Fragment::Shy) {
        r.failures.push("base appendix ontology should be shy".into());
    }
    r.cases += 1;
    match violation(&onto("shy_appendix_prime"), Fragment::Shy) {
        Some(ViolationWitness::ShyJoin {
            rule,
            variable,
            attacker,
            ..
        }) if rule == "r2" && variable.to_string() == "Y2" && attacker.to_string() == "Y3" => {}
        other => r
            .failures
            .push(format!("primed appendix ontology: unexpected verdict {other:?}")),
    }
    r.cases += 1;
    match violation(&onto("shy_appendix_dprime"), Fragment::Shy) {
        Some(ViolationWitness::ShyPair { rule, attacker, .. }) if rule == "r2" && attacker.to_string() == "Y3" => {}
        other => r
            .failures
            .push(format!("double-primed appendix ontology: unexpected verdict {other:?}")),
    }
    r.cases += 1;
    let report = classify(&onto("sticky_counter"));
    if !report.is(Fragment::Linear) || report.is(Fragment::Sticky) {
        r.failures.push(format!("expected linear and not sticky:\n{report}"));
    }
    r
}

fn prefix_config(rounds: usize, injective: bool) -> ChaseConfig {
    ChaseConfig {
        mode: ChaseMode::Oblivious,
        max_atoms: ROUND_CAP,
        max_rounds: rounds,
        injective,
    }
}

/// Complete rounds of the oblivious chase until `PREFIX_ATOMS` atoms or
/// termination. `None` if a single round blows past the cap.
fn prefix_rounds(start: &Instance, onto: &Ontology, injective: bool) -> Option<(usize, Instance)> {
    let mut chase = Chase::new(start.clone(), onto, prefix_config(usize::MAX, injective));
    while chase.instance().len() < PREFIX_ATOMS && chase.round() {}
    if chase.finished() == Some(false) {
        return None;
    }
    Some((chase.rounds(), chase.instance().clone()))
}

fn commutation_case(name: &str, p: &Program, mutate: bool) -> Outcome {
    let c = match rewrite(p) {
        Ok(c) => c,
        Err(e) => return Outcome::Fail(format!("{name}: {e}")),
    };
    let Some((rounds, plain)) = prefix_rounds(p.database.instance(), &p.ontology, false) else {
        return Outcome::Skip(format!("{name}: chase round exceeds {ROUND_CAP} atoms"));
    };
    let mut onto = c.ontology.clone();
    if mutate {
        let probe = run_chase(&c.database, &onto, &prefix_config(rounds, true));
        let Some(step) = probe.steps.first() else {
            return Outcome::Skip(format!("{name}: no canonical rule fires, nothing to corrupt"));
        };
        onto.rules.retain(|r| *r.id != *step.rule);
    }
    let canon = run_chase(&c.database, &onto, &prefix_config(rounds, true));
    if canon.instance.len() >= ROUND_CAP {
        return Outcome::Fail(format!(
            "{name}: canonical chase exceeded {ROUND_CAP} atoms\n{}",
            dump(name, p)
        ));
    }
    let unpacked = match unpack_instance(&canon.instance) {
        Ok(i) => i,
        Err(e) => return Outcome::Fail(format!("{name}: {e}")),
    };
    if unpacked.len() == plain.len() && isomorphic(&unpacked, &plain) {
        Outcome::Pass
    } else {
        Outcome::Fail(format!(
            "{name}: after {rounds} rounds the chase has {} atoms, the unpacked canonical chase {}\n{}",
            plain.len(),
            unpacked.len(),
            dump(name, p)
        ))
    }
}

/// Unpacking the chase of the rewriting gives back the chase of the input,
/// compared after the same number of rounds.
pub fn chase_commutation(programs: &[NamedProgram], want: usize, mutate: bool) -> CheckReport {
    let mut r = CheckReport::new(3, "chase commutation");
    let outcomes: Vec<Outcome> = programs
        .par_iter()
        .map(|(n, p)| commutation_case(n, p, mutate))
        .collect();
    r.absorb(take_evaluated(outcomes, want));
    r
}

/// The first `want` outcomes that are not skips, plus the skips before
/// them.
fn take_evaluated(outcomes: Vec<Outcome>, want: usize) -> Vec<Outcome> {
    let mut out = Vec::new();
    let mut n = 0;
    for o in outcomes {
        if n == want {
            break;
        }
        if !matches!(o, Outcome::Skip(_)) {
            n += 1;
        }
        out.push(o);
    }
    out
}

fn active_case(name: &str, p: &Program) -> Outcome {
    let c = match rewrite(p) {
        Ok(c) => c,
        Err(e) => return Outcome::Fail(format!("{name}: {e}")),
    };
    let (active, _) = partition_active_harmless(&c.ontology);
    let Some((rounds, small)) = prefix_rounds(c.database.instance(), &active, true) else {
        return Outcome::Skip(format!("{name}: chase round exceeds {ROUND_CAP} atoms"));
    };
    let full = run_chase(&c.database, &c.ontology, &prefix_config(rounds, true));
    if full.instance.len() == small.len() && isomorphic(&full.instance, &small) {
        return Outcome::Pass;
    }
    let fired: Vec<&str> = full
        .steps
        .iter()
        .filter(|s| c.ontology.rule(&s.rule).is_some_and(is_harmless))
        .map(|s| &*s.rule)
        .take(3)
        .collect();
    Outcome::Fail(format!(
        "{name}: after {rounds} rounds the full rewriting has {} atoms, its active part {}; harmless rules fired: {}\n{}",
        full.instance.len(),
        small.len(),
        fired.join(", "),
        dump(name, p)
    ))
}

/// The chase of the rewriting equals the chase of its active part, and on
/// the worked example no harmless rule fires.
pub fn active_part_equality(programs: &[NamedProgram], want: usize) -> CheckReport {
    let mut r = CheckReport::new(4, "active part chase equality");
    let p = parse_program(paper_theory("active_harmless").unwrap()).unwrap();
    let c = rewrite(&p).unwrap();
    let res = run_chase(
        &c.database,
        &c.ontology,
        &ChaseConfig {
            mode: ChaseMode::Oblivious,
            max_atoms: 300,
            max_rounds: usize::MAX,
            injective: true,
        },
    );
    r.cases += 1;
    let harmless: Vec<&str> = res
        .steps
        .iter()
        .filter(|s| c.ontology.rule(&s.rule).is_some_and(is_harmless))
        .map(|s| &*s.rule)
        .collect();
    if !harmless.is_empty() {
        r.failures.push(format!(
            "harmless rules fired on the worked example: {}",
            harmless.join(", ")
        ));
    }
    let mut outcomes = vec![active_case("active_harmless", &p)];
    outcomes.extend(programs.par_iter().map(|(n, p)| active_case(n, p)).collect::<Vec<_>>());
    r.absorb(take_evaluated(outcomes, want + 1));
    r
}

fn preservation_case(name: &str, p: &Program, source: Fragment, target: Fragment) -> Outcome {
    if !is_member(&p.ontology, source) {
        return Outcome::Skip(format!("{name} is not {}", source.name()));
    }
    let c = match rewrite(p) {
        Ok(c) => c,
        Err(e) => return Outcome::Fail(format!("{name}: {e}")),
    };
    match violation(&c.ontology, target) {
        None => Outcome::Pass,
        Some(w) => Outcome::Fail(format!(
            "{name}: {} ontology rewrites to a non-{} one: {w}\n{}",
            source.name(),
            target.name(),
            dump(name, p)
        )),
    }
}

/// Fragment membership carried over by the rewriting: shy to shy, linear to
/// inclusion dependencies, sticky to sticky.
pub fn fragment_preservation(shy: &[NamedProgram], linear: &[NamedProgram], sticky: &[NamedProgram]) -> CheckReport {
    let mut r = CheckReport::new(5, "fragment preservation");
    for (suite, source, target) in [
        (shy, Fragment::Shy, Fragment::Shy),
        (linear, Fragment::Linear, Fragment::InclusionDependencies),
        (sticky, Fragment::Sticky, Fragment::Sticky),
    ] {
        let outcomes: Vec<Outcome> = suite
            .par_iter()
            .map(|(n, p)| preservation_case(n, p, source, target))
            .collect();
        let bad = outcomes.iter().filter(|o| matches!(o, Outcome::Fail(_))).count();
        let done = outcomes.iter().filter(|o| !matches!(o, Outcome::Skip(_))).count();
        r.notes.push(format!(
            "{} -> {}: {bad} of {done} violate",
            source.name(),
            target.name()
        ));
        r.absorb(outcomes);
    }
    r
}

fn restricted(limit: usize) -> ChaseConfig {
    ChaseConfig::restricted(limit)
}

fn transfer_case(name: &str, p: &Program) -> Vec<Outcome> {
    let c = match rewrite(p) {
        Ok(c) => c,
        Err(e) => return vec![Outcome::Fail(format!("{name}: {e}"))],
    };
    p.queries
        .iter()
        .zip(&c.queries)
        .enumerate()
        .map(|(i, (q, qc))| {
            let a = entails(&p.database, &p.ontology, q, &restricted(CHASE_LIMIT));
            let b = entails(&c.database, &c.ontology, qc, &restricted(CHASE_LIMIT));
            match (&a, &b) {
                (Entailment::Unknown, _) | (_, Entailment::Unknown) => Outcome::Fail(format!(
                    "{name} query {}: chase did not terminate within {CHASE_LIMIT} atoms",
                    i + 1
                )),
                _ if a.as_str() == b.as_str() => Outcome::Pass,
                _ => Outcome::Fail(format!(
                    "{name} query {} ({q}): {} on the input, {} on the rewriting",
                    i + 1,
                    a.as_str(),
                    b.as_str()
                )),
            }
        })
        .collect()
}

/// Entailment agrees between each curated theory and its rewriting.
pub fn entailment_transfer(curated: &[NamedProgram]) -> CheckReport {
    let mut r = CheckReport::new(6, "entailment transfer");
    let outcomes: Vec<Vec<Outcome>> = curated.par_iter().map(|(n, p)| transfer_case(n, p)).collect();
    for (n, p) in curated {
        if p.queries.len() < 3 {
            r.failures.push(format!("{n} has fewer than 3 queries"));
        }
    }
    r.absorb(outcomes.into_iter().flatten().collect());
    r
}

fn budget() -> Budget {
    Budget::new(MODEL_BUDGET.0, MODEL_BUDGET.1)
}

/// `m` plus a copy of it with every term renamed to a fresh null. When the
/// rules mention no constants the union is again a model, and the copy
/// has no support.
fn padded(m: &Instance) -> Instance {
    let base = m.max_null().map_or(1, |n| n + 1);
    let fresh: BTreeMap<Term, Term> = m
        .terms()
        .into_iter()
        .zip(base..)
        .map(|(t, i)| (t, Term::null(i)))
        .collect();
    let mut out = m.clone();
    for a in m.iter() {
        out.insert(Atom::new(
            a.predicate.clone(),
            a.args.iter().map(|t| fresh[t].clone()).collect(),
        ));
    }
    out
}

fn support_case(name: &str, p: &Program) -> (Outcome, String) {
    let e = enumerate_models(&p.database, &p.ontology, budget());
    let mut minimal = 0;
    let mut padded_models = 0;
    for m in &e.models {
        let core = well_supported_core(m, &p.database, &p.ontology).instance();
        if !is_model(&core, &p.database, &p.ontology) {
            return (
                Outcome::Fail(format!("{name}: well-supported core of {m} is not a model")),
                String::new(),
            );
        }
        let big = padded(m);
        if is_model(&big, &p.database, &p.ontology) {
            padded_models += 1;
            let core = well_supported_core(&big, &p.database, &p.ontology).instance();
            if !is_model(&core, &p.database, &p.ontology) {
                return (
                    Outcome::Fail(format!("{name}: padded model {big} does not shrink to a model")),
                    String::new(),
                );
            }
        }
        if is_minimal_model(m, &p.database, &p.ontology) {
            minimal += 1;
            if find_support_ordering(m, &p.database, &p.ontology).is_none() {
                return (
                    Outcome::Fail(format!("{name}: minimal model without support ordering: {m}")),
                    String::new(),
                );
            }
        }
    }
    let note = format!(
        "{name}: {} models, {minimal} minimal, {padded_models} padded{}",
        e.models.len(),
        if e.complete { "" } else { " (search cut at node limit)" }
    );
    (Outcome::Pass, note)
}

/// Minimal finite models admit support orderings, and every finite model
/// shrinks to a well-supported one.
pub fn well_supported_models(curated: &[NamedProgram]) -> CheckReport {
    let mut r = CheckReport::new(7, "well-supported finite models");
    let results: Vec<(Outcome, String)> = curated.par_iter().map(|(n, p)| support_case(n, p)).collect();
    let mut outcomes = Vec::new();
    for (o, note) in results {
        if !note.is_empty() {
            r.notes.push(note);
        }
        outcomes.push(o);
    }
    r.absorb(outcomes);
    r
}

/// Models of the active part to feed the repair: the restricted chase
/// result when it terminates, else the minimal models within a small budget.
fn active_models(c: &CanonicalProgram, active: &Ontology) -> Vec<Instance> {
    let res = run_chase(&c.database, active, &restricted(CHASE_LIMIT));
    if res.terminated {
        return vec![res.instance];
    }
    crate::finitemodels::enumerate_finite_models(
        &c.database,
        active,
        Budget {
            max_nodes: 20_000,
            ..Budget::new(2, 10)
        },
    )
    .models
    .into_iter()
    .take(3)
    .collect()
}

fn repair_case(name: &str, p: &Program) -> Outcome {
    let c = match rewrite(p) {
        Ok(c) => c,
        Err(e) => return Outcome::Fail(format!("{name}: {e}")),
    };
    let (active, _) = partition_active_harmless(&c.ontology);
    let models = active_models(&c, &active);
    if models.is_empty() {
        return Outcome::Skip(format!("{name}: no model of the active part within budget"));
    }
    for m in models {
        let Some(ord) = find_support_ordering(&m, &c.database, &active) else {
            return Outcome::Fail(format!("{name}: model of the active part is not well-supported: {m}"));
        };
        let res = match disjoin_repair(&m, &ord, &c.ontology) {
            Ok(res) => res,
            Err(e) => return Outcome::Fail(format!("{name}: repair failed on {m}: {e}\n{}", dump(name, p))),
        };
        if !is_model(&res.instance, &c.database, &c.ontology) {
            return Outcome::Fail(format!(
                "{name}: repaired instance is not a model: {}\n{}",
                res.instance,
                dump(name, p)
            ));
        }
        if find_support_ordering(&res.instance, &c.database, &c.ontology).is_none() {
            return Outcome::Fail(format!(
                "{name}: repaired instance is not well-supported: {}",
                res.instance
            ));
        }
        let image: Instance = res.instance.iter().map(|a| res.homomorphism.apply_atom(a)).collect();
        if !image.is_subset(&m) {
            return Outcome::Fail(format!("{name}: repaired instance does not map into the input model"));
        }
        for q in &c.queries {
            if let Some(w) = satisfies_query(&res.instance, q) {
                let back = w.mapping.then(&res.homomorphism);
                if !q.disjuncts[w.disjunct].iter().all(|a| m.contains(&back.apply_atom(a))) {
                    return Outcome::Fail(format!("{name}: witness of {q} does not transfer"));
                }
            }
        }
    }
    Outcome::Pass
}

/// The repair of the proof example, then the repair oracle on random shy
/// theories.
pub fn repair_construction(programs: &[NamedProgram], want: usize) -> CheckReport {
    let mut r = CheckReport::new(8, "repair construction");
    r.cases += 1;
    if let Err(e) = theorem8_golden() {
        r.failures.push(e);
    }
    let outcomes: Vec<Outcome> = programs.par_iter().map(|(n, p)| repair_case(n, p)).collect();
    let outcomes = take_evaluated(outcomes, want);
    let evaluated = outcomes.iter().filter(|o| !matches!(o, Outcome::Skip(_))).count();
    if evaluated < want {
        r.extra_failed = true;
        r.notes.push(format!(
            "only {evaluated} of {want} random theories had a model to repair"
        ));
    }
    r.absorb(outcomes);
    r
}

fn theorem8_golden() -> Result<(), String> {
    let p = parse_program(paper_theory("theorem8").unwrap()).unwrap();
    let c = rewrite(&p)?;
    let (active, _) = partition_active_harmless(&c.ontology);
    let m = parse_instance("s_[c]. p_[1](_:n1). r_[1](_:n1).").unwrap();
    let ord = check_ordering(&m.to_vec(), &c.database, &active).map_err(|i| format!("atom {i} unsupported"))?;
    let res = disjoin_repair(&m, &ord, &c.ontology).map_err(|e| e.to_string())?;
    let want = parse_instance("s_[c]. p_[1](_:n1). r_[1](_:n2).").unwrap();
    if !isomorphic(&res.instance, &want) {
        return Err(format!("repair gave {}", res.instance));
    }
    if !is_model(&res.instance, &c.database, &c.ontology) {
        return Err("repair is not a model".into());
    }
    if find_support_ordering(&res.instance, &c.database, &c.ontology).is_none() {
        return Err("repair is not well-supported".into());
    }
    let image: Instance = res.instance.iter().map(|a| res.homomorphism.apply_atom(a)).collect();
    if !image.is_subset(&m) {
        return Err("repair does not map into M".into());
    }
    Ok(())
}

fn countermodel_case(name: &str, p: &Program) -> Vec<(Outcome, Option<bool>)> {
    p.queries
        .iter()
        .enumerate()
        .map(|(i, q)| {
            let verdict = entails(&p.database, &p.ontology, q, &restricted(CHASE_LIMIT));
            let found = find_finite_countermodel(&p.database, &p.ontology, q, budget());
            match (verdict, found) {
                (Entailment::True(_), Some(m)) => (
                    Outcome::Fail(format!("{name} query {}: entailed, yet countermodel {m}", i + 1)),
                    None,
                ),
                (Entailment::True(_), None) => (Outcome::Pass, None),
                (Entailment::False, found) => (Outcome::Pass, Some(found.is_some())),
                (Entailment::Unknown, _) => (
                    Outcome::Skip(format!("{name} query {}: chase did not terminate", i + 1)),
                    None,
                ),
            }
        })
        .collect()
}

/// Soundness of the countermodel search, and how often it finds one when
/// the chase says the query is not entailed.
pub fn finite_countermodels(curated: &[NamedProgram]) -> CheckReport {
    let mut r = CheckReport::new(9, "finite countermodels");
    let results: Vec<(Outcome, Option<bool>)> = curated.par_iter().flat_map(|(n, p)| countermodel_case(n, p)).collect();
    let (mut hits, mut misses) = (0, 0);
    let mut outcomes = Vec::new();
    for (o, hit) in results {
        match hit {
            Some(true) => hits += 1,
            Some(false) => misses += 1,
            None => {}
        }
        outcomes.push(o);
    }
    let total = hits + misses;
    r.notes.push(format!(
        "countermodel hit rate {hits}/{total}{}",
        if total > 0 {
            format!(" ({:.0}%)", 100.0 * hits as f64 / total as f64)
        } else {
            String::new()
        }
    ));
    r.absorb(outcomes);
    r
}

/// Annotations of the worked propagation example.
pub fn propagation_golden() -> CheckReport {
    let mut r = CheckReport::new(10, "propagation ordering");
    let p = parse_program(paper_theory("propagation").unwrap()).unwrap();
    let order =
        parse_instance("s(c1). p(c1,c2). p(c1,_:n1). u(c2,c1). t(c2). u(_:n1,c1). r(_:n1,c1). t(_:n1). r(c2,c1).")
            .unwrap()
            .to_vec();
    let ann = check_ordering(&order, &p.database, &p.ontology)
        .map_err(|i| format!("atom {} is unsupported", i + 1))
        .and_then(|ord| propagation_ordering(&ord, &p.ontology).map_err(|e| e.to_string()));
    let ann = match ann {
        Ok(a) => a,
        Err(e) => {
            r.failures.push(e);
            return r;
        }
    };
    let c = |n: &str| AnnotatedTerm::Plain(Term::constant(n));
    let sp = |t: Term, atom, position| {
        AnnotatedTerm::Start(StartingPoint {
            term: t,
            atom,
            position,
        })
    };
    let (c2, n1) = (Term::constant("c2"), Term::null(1));
    let want: Vec<(usize, Vec<AnnotatedTerm>)> = vec![
        (1, vec![c("c1"), sp(c2.clone(), 2, 2)]),
        (2, vec![c("c1"), sp(n1.clone(), 3, 2)]),
        (3, vec![sp(c2.clone(), 4, 1), c("c1")]),
        (4, vec![sp(c2.clone(), 2, 2)]),
        (5, vec![sp(n1.clone(), 6, 1), c("c1")]),
        (6, vec![sp(n1.clone(), 3, 2), c("c1")]),
        (7, vec![sp(n1, 3, 2)]),
        (8, vec![sp(c2, 2, 2), c("c1")]),
    ];
    for (i, args) in want {
        r.cases += 1;
        if ann[i].args != args {
            r.failures.push(format!("atom {}: got {}", i + 1, ann[i]));
        }
    }
    r
}
