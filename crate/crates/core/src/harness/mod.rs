//! Differential checks over the worked examples, a curated suite of small
//! terminating theories, and seeded random suites.

mod checks;
pub mod generator;

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::classify::Fragment;
use crate::logic::Program;
use crate::parse::parse_program;

pub use checks::{
    active_part_equality, chase_commutation, entailment_transfer, finite_countermodels, fragment_preservation,
    golden_classification, golden_rewriting, propagation_golden, repair_construction, well_supported_models,
    CheckReport, CHASE_LIMIT, MODEL_BUDGET, PREFIX_ATOMS,
};
pub use generator::{random_suite, Generator, GeneratorConfig};

pub type NamedProgram = (String, Program);

const PAPER: &[(&str, &str)] = &[
    ("father", include_str!("../../data/paper/father.dlp")),
    ("shy_appendix", include_str!("../../data/paper/shy_appendix.dlp")),
    (
        "shy_appendix_prime",
        include_str!("../../data/paper/shy_appendix_prime.dlp"),
    ),
    (
        "shy_appendix_dprime",
        include_str!("../../data/paper/shy_appendix_dprime.dlp"),
    ),
    ("sticky_counter", include_str!("../../data/paper/sticky_counter.dlp")),
    ("active_harmless", include_str!("../../data/paper/active_harmless.dlp")),
    ("theorem8", include_str!("../../data/paper/theorem8.dlp")),
    ("propagation", include_str!("../../data/paper/propagation.dlp")),
    ("constant_rule", include_str!("../../data/paper/constant_rule.dlp")),
];

const CURATED: &[(&str, &str)] = &[
    ("family", include_str!("../../data/curated/family.dlp")),
    ("employee", include_str!("../../data/curated/employee.dlp")),
    ("reach", include_str!("../../data/curated/reach.dlp")),
    ("course", include_str!("../../data/curated/course.dlp")),
    ("supervision", include_str!("../../data/curated/supervision.dlp")),
    ("ownership", include_str!("../../data/curated/ownership.dlp")),
    ("colouring", include_str!("../../data/curated/colouring.dlp")),
    ("citation", include_str!("../../data/curated/citation.dlp")),
    ("chain", include_str!("../../data/curated/chain.dlp")),
    ("friends", include_str!("../../data/curated/friends.dlp")),
    ("mothers", include_str!("../../data/curated/mothers.dlp")),
    ("orders", include_str!("../../data/curated/orders.dlp")),
    ("constant_join", include_str!("../../data/curated/constant_join.dlp")),
    ("order_relation", include_str!("../../data/curated/order_relation.dlp")),
    ("two_nulls", include_str!("../../data/curated/two_nulls.dlp")),
    ("weather", include_str!("../../data/curated/weather.dlp")),
    ("split_join", include_str!("../../data/curated/split_join.dlp")),
    ("units", include_str!("../../data/curated/units.dlp")),
    ("constant_rule", include_str!("../../data/curated/constant_rule.dlp")),
    ("likes", include_str!("../../data/curated/likes.dlp")),
    ("lists", include_str!("../../data/curated/lists.dlp")),
    ("guarded_join", include_str!("../../data/curated/guarded_join.dlp")),
];

/// Source text of a bundled worked example.
pub fn paper_theory(name: &str) -> Option<&'static str> {
    PAPER.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn paper_theory_names() -> impl Iterator<Item = &'static str> {
    PAPER.iter().map(|(n, _)| *n)
}

pub fn curated_suite() -> Vec<NamedProgram> {
    CURATED
        .iter()
        .map(|(n, t)| (n.to_string(), parse_program(t).expect("bundled theory parses")))
        .collect()
}

/// Named random programs, `<fragment>-<seed>-<i>`.
pub fn named_random_suite(
    cfg: &GeneratorConfig,
    seed: u64,
    count: usize,
    fragment: Option<Fragment>,
    queries: usize,
) -> Vec<NamedProgram> {
    let tag = fragment.map_or("any", |f| f.name());
    random_suite(cfg, seed, count, fragment, queries)
        .into_iter()
        .enumerate()
        .map(|(i, p)| (format!("{tag}-{seed}-{i}"), p))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Paper,
    Curated,
    Random,
    All,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "paper" => Ok(Suite::Paper),
            "curated" => Ok(Suite::Curated),
            "random" => Ok(Suite::Random),
            "all" | "acceptance" => Ok(Suite::All),
            _ => Err(format!("unknown suite {s:?}; expected paper, curated, random or all")),
        }
    }
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Paper => "paper",
            Suite::Curated => "curated",
            Suite::Random => "random",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Debug)]
pub struct HarnessOptions {
    pub seed: u64,
    /// Random theories per randomized check.
    pub count: usize,
    /// Drop one firing canonical rule before the commutation check.
    pub mutate: bool,
    pub config: GeneratorConfig,
}

impl Default for HarnessOptions {
    fn default() -> Self {
        HarnessOptions {
            seed: 42,
            count: 50,
            mutate: false,
            config: GeneratorConfig::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": crate::parse::json::SCHEMA,
            "kind": "harness",
            "suite": self.suite.name(),
            "seed": self.seed,
            "passed": self.passed(),
            "checks": self.checks.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {} (seed {})", self.suite.name(), self.seed)?;
        for c in &self.checks {
            let verdict = if c.passed() { "PASS" } else { "FAIL" };
            writeln!(
                f,
                "{verdict} C{:<2} {:<30} cases={} skipped={}",
                c.id, c.name, c.cases, c.skipped
            )?;
            for n in &c.notes {
                writeln!(f, "      note: {n}")?;
            }
            for x in c.failures.iter().take(5) {
                for (i, line) in x.lines().enumerate() {
                    writeln!(f, "      {} {line}", if i == 0 { "!" } else { " " })?;
                }
            }
            if c.failures.len() > 5 {
                writeln!(f, "      ... {} more failures", c.failures.len() - 5)?;
            }
        }
        write!(
            f,
            "{}",
            if self.passed() {
                "all checks passed"
            } else {
                "violations found"
            }
        )
    }
}

fn paper_programs(names: &[&str]) -> Vec<NamedProgram> {
    names
        .iter()
        .map(|n| (n.to_string(), parse_program(paper_theory(n).unwrap()).unwrap()))
        .collect()
}

pub fn run_suite(suite: Suite, opts: &HarnessOptions) -> SuiteReport {
    let cfg = &opts.config;
    let n = opts.count;
    let mut checks = Vec::new();
    let paper = matches!(suite, Suite::Paper | Suite::All);
    let random = matches!(suite, Suite::Random | Suite::All);
    let curated = matches!(suite, Suite::Curated | Suite::All);
    if paper {
        checks.push(golden_rewriting());
        checks.push(golden_classification());
    }
    if paper || random {
        let mut programs = if paper {
            paper_programs(&["father", "active_harmless"])
        } else {
            Vec::new()
        };
        let base = programs.len();
        if random {
            programs.extend(named_random_suite(cfg, opts.seed, 2 * n, None, 0));
        }
        let want = base + if random { n } else { 0 };
        checks.push(chase_commutation(&programs, want, opts.mutate));
        let shy = if random {
            named_random_suite(cfg, opts.seed, 2 * n, Some(Fragment::Shy), 2)
        } else {
            Vec::new()
        };
        checks.push(active_part_equality(&shy, if random { n } else { 0 }));
        if random {
            let linear = named_random_suite(cfg, opts.seed, n, Some(Fragment::Linear), 0);
            let sticky = named_random_suite(cfg, opts.seed, n, Some(Fragment::Sticky), 0);
            checks.push(fragment_preservation(&shy[..n.min(shy.len())], &linear, &sticky));
        }
        checks.push(repair_construction(&shy, if random { n } else { 0 }));
    }
    if curated {
        let suite = curated_suite();
        checks.push(entailment_transfer(&suite));
        checks.push(well_supported_models(&suite));
        checks.push(finite_countermodels(&suite));
    }
    if paper {
        checks.push(propagation_golden());
    }
    checks.sort_by_key(|c| c.id);
    SuiteReport {
        suite,
        seed: opts.seed,
        checks,
    }
}
