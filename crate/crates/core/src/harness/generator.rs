use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::classify::{is_member, Fragment};
use crate::logic::{Atom, Database, Ontology, Predicate, Program, Query, Rule, Term};

pub const DEFAULT_CONFIG: &str = include_str!("../../data/generator.toml");

#[derive(Clone, Debug, Deserialize)]
pub struct GeneratorConfig {
    pub ontology: OntologyConfig,
    pub database: DatabaseConfig,
    pub query: QueryConfig,
    pub search: SearchConfig,
}

#[derive(Clone, Debug, Deserialize)]
pub struct OntologyConfig {
    pub predicates: usize,
    pub min_arity: usize,
    pub max_arity: usize,
    pub min_rules: usize,
    pub max_rules: usize,
    pub max_body_atoms: usize,
    pub max_rule_variables: usize,
    pub reuse_probability: f64,
    pub existential_probability: f64,
    pub constant_probability: f64,
}

#[derive(Clone, Debug, Deserialize)]
pub struct DatabaseConfig {
    pub constants: usize,
    pub facts: usize,
}

#[derive(Clone, Debug, Deserialize)]
pub struct QueryConfig {
    pub max_atoms: usize,
    pub constant_probability: f64,
}

#[derive(Clone, Debug, Deserialize)]
pub struct SearchConfig {
    pub max_attempts: usize,
}

impl GeneratorConfig {
    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig::parse(DEFAULT_CONFIG).expect("bundled generator config parses")
    }
}

/// Seeded generator of random programs. Each theory draws from its own
/// stream, so theory `i` of a suite does not depend on the others.
pub struct Generator {
    cfg: GeneratorConfig,
    rng: ChaCha8Rng,
    signature: Vec<(String, usize)>,
}

impl Generator {
    pub fn new(cfg: &GeneratorConfig, seed: u64) -> Self {
        Generator {
            cfg: cfg.clone(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            signature: Vec::new(),
        }
    }

    fn constants(&self) -> Vec<Term> {
        (1..=self.cfg.database.constants)
            .map(|i| Term::constant(&format!("c{i}")))
            .collect()
    }

    fn fresh_signature(&mut self) {
        let o = &self.cfg.ontology;
        let (lo, hi) = (o.min_arity, o.max_arity.max(o.min_arity));
        self.signature = (0..o.predicates)
            .map(|i| (format!("p{i}"), self.rng.gen_range(lo..=hi)))
            .collect();
    }

    fn predicate(&mut self) -> (Predicate, usize) {
        let (name, arity) = self
            .signature
            .choose(&mut self.rng)
            .expect("non-empty signature")
            .clone();
        (Predicate::new(&name), arity)
    }

    fn rule(&mut self, index: usize, max_body: usize) -> Rule {
        let o = self.cfg.ontology.clone();
        let consts = self.constants();
        let body_len = self.rng.gen_range(1..=max_body.max(1));
        let mut vars: Vec<Term> = Vec::new();
        let mut body = Vec::with_capacity(body_len);
        for _ in 0..body_len {
            let (p, n) = self.predicate();
            let mut args = Vec::with_capacity(n);
            for _ in 0..n {
                let t = if !consts.is_empty() && self.rng.gen_bool(o.constant_probability) {
                    consts.choose(&mut self.rng).unwrap().clone()
                } else if !vars.is_empty()
                    && (vars.len() >= o.max_rule_variables || self.rng.gen_bool(o.reuse_probability))
                {
                    vars.choose(&mut self.rng).unwrap().clone()
                } else {
                    let v = Term::variable(&format!("X{}", vars.len() + 1));
                    vars.push(v.clone());
                    v
                };
                args.push(t);
            }
            body.push(Atom::new(p, args));
        }
        let (p, n) = self.predicate();
        let mut ev: Vec<Term> = Vec::new();
        let mut args = Vec::with_capacity(n);
        for _ in 0..n {
            let t = if self.rng.gen_bool(o.existential_probability) {
                if !ev.is_empty() && self.rng.gen_bool(0.2) {
                    ev.choose(&mut self.rng).unwrap().clone()
                } else {
                    let z = Term::variable(&format!("Z{}", ev.len() + 1));
                    ev.push(z.clone());
                    z
                }
            } else if !vars.is_empty() && !self.rng.gen_bool(o.constant_probability) {
                vars.choose(&mut self.rng).unwrap().clone()
            } else if !consts.is_empty() {
                consts.choose(&mut self.rng).unwrap().clone()
            } else {
                let z = Term::variable(&format!("Z{}", ev.len() + 1));
                ev.push(z.clone());
                z
            };
            args.push(t);
        }
        Rule::new(&format!("r{index}"), body, Atom::new(p, args)).expect("generated rule is well formed")
    }

    fn ontology_with(&mut self, max_body: usize) -> Ontology {
        self.fresh_signature();
        let o = &self.cfg.ontology;
        let n = self.rng.gen_range(o.min_rules..=o.max_rules.max(o.min_rules));
        let rules = (1..=n).map(|i| self.rule(i, max_body)).collect();
        Ontology::normalized(rules)
    }

    pub fn ontology(&mut self) -> Ontology {
        self.ontology_with(self.cfg.ontology.max_body_atoms)
    }

    /// Facts over the current signature.
    pub fn database(&mut self) -> Database {
        let consts = self.constants();
        let mut facts = Vec::new();
        for _ in 0..self.cfg.database.facts {
            let (p, n) = self.predicate();
            let args = (0..n).map(|_| consts.choose(&mut self.rng).unwrap().clone()).collect();
            facts.push(Atom::new(p, args));
        }
        Database::new(facts).expect("facts are ground")
    }

    pub fn query(&mut self) -> Query {
        let consts = self.constants();
        let qc = self.cfg.query.clone();
        let len = self.rng.gen_range(1..=qc.max_atoms.max(1));
        let mut vars: Vec<Term> = Vec::new();
        let mut atoms = Vec::with_capacity(len);
        for _ in 0..len {
            let (p, n) = self.predicate();
            let mut args = Vec::with_capacity(n);
            for _ in 0..n {
                let t = if !consts.is_empty() && self.rng.gen_bool(qc.constant_probability) {
                    consts.choose(&mut self.rng).unwrap().clone()
                } else if !vars.is_empty() && self.rng.gen_bool(0.5) {
                    vars.choose(&mut self.rng).unwrap().clone()
                } else {
                    let v = Term::variable(&format!("Q{}", vars.len() + 1));
                    vars.push(v.clone());
                    v
                };
                args.push(t);
            }
            atoms.push(Atom::new(p, args));
        }
        Query::conjunctive(atoms).expect("generated query is well formed")
    }

    /// A program whose ontology belongs to `fragment` (or any ontology when
    /// `None`), with a database and `queries` queries over its signature.
    /// Gives up after the configured number of attempts.
    pub fn program(&mut self, fragment: Option<Fragment>, queries: usize) -> Option<Program> {
        let max_body = match fragment {
            Some(Fragment::Linear | Fragment::InclusionDependencies) => 1,
            _ => self.cfg.ontology.max_body_atoms,
        };
        for _ in 0..self.cfg.search.max_attempts {
            let onto = self.ontology_with(max_body);
            if fragment.is_none_or(|f| is_member(&onto, f)) {
                let database = self.database();
                let queries = (0..queries).map(|_| self.query()).collect();
                return Some(Program {
                    database,
                    ontology: onto,
                    queries,
                });
            }
        }
        None
    }
}

/// `count` programs; theory `i` comes from seed `seed * 1_000_003 + i`.
pub fn random_suite(
    cfg: &GeneratorConfig,
    seed: u64,
    count: usize,
    fragment: Option<Fragment>,
    queries: usize,
) -> Vec<Program> {
    (0..count as u64)
        .filter_map(|i| Generator::new(cfg, seed.wrapping_mul(1_000_003).wrapping_add(i)).program(fragment, queries))
        .collect()
}
