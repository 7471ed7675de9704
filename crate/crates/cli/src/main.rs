use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use shychase::canonical::{partition_active_harmless, rewrite_program};
use shychase::chase::{entails, run_chase, ChaseConfig, ChaseMode, Entailment};
use shychase::classify::classify;
use shychase::finitemodels::{find_finite_countermodel, Budget};
use shychase::harness::{run_suite, GeneratorConfig, HarnessOptions, Suite};
use shychase::parse::{json as js, parse_program, print_program};
use shychase::Program;

#[derive(Parser)]
#[command(
    name = "shychase",
    version,
    about = "Chase, classify and rewrite existential rule theories"
)]
struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Oblivious,
    Restricted,
}

impl From<Mode> for ChaseMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Oblivious => ChaseMode::Oblivious,
            Mode::Restricted => ChaseMode::Restricted,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fragment membership table with a witness for each failed fragment.
    Classify { file: PathBuf },
    /// Run the chase and print the resulting instance.
    Chase {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "oblivious")]
        mode: Mode,
        #[arg(long, default_value_t = 10_000)]
        max_atoms: usize,
        #[arg(long)]
        max_rounds: Option<usize>,
        /// Also list every chase step.
        #[arg(long)]
        steps: bool,
    },
    /// Decide the queries of a file by chasing.
    Answer {
        file: PathBuf,
        /// 1-based query index; all queries when omitted.
        #[arg(long)]
        query: Option<usize>,
        #[arg(long, value_enum, default_value = "restricted")]
        mode: Mode,
        #[arg(long, default_value_t = 10_000)]
        max_atoms: usize,
    },
    /// Print the canonical rewriting.
    Rewrite {
        file: PathBuf,
        /// Split the rewritten rules into active and harmless ones.
        #[arg(long)]
        partition: bool,
    },
    /// Compare chase verdicts with a bounded finite countermodel search.
    FcCheck {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_nulls: usize,
        #[arg(long, default_value_t = 12)]
        max_atoms: usize,
        #[arg(long)]
        query: Option<usize>,
        /// Atom bound for the restricted chase.
        #[arg(long, default_value_t = 500)]
        chase_limit: usize,
    },
    /// Run the differential checks.
    Harness {
        #[arg(long, default_value = "paper")]
        suite: Suite,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Random theories per randomized check.
        #[arg(long, default_value_t = 50)]
        count: usize,
        /// Drop one firing canonical rule; the commutation check must then fail.
        #[arg(long)]
        mutate: bool,
        /// Generator settings (TOML); the bundled defaults otherwise.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

/// Usage and input errors map to exit code 2.
struct Usage(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.into())
    }
}

fn load(path: &Path) -> Result<Program> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_program(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn pick_queries(p: &Program, query: Option<usize>) -> Result<Vec<usize>> {
    match query {
        None => Ok((0..p.queries.len()).collect()),
        Some(i) if i >= 1 && i <= p.queries.len() => Ok(vec![i - 1]),
        Some(i) => Err(anyhow!(
            "query {i} out of range; the file has {} queries",
            p.queries.len()
        )),
    }
}

fn emit(as_json: bool, value: Value, text: String) {
    let mut out = if as_json {
        serde_json::to_string_pretty(&value).expect("JSON values serialize")
    } else {
        text
    };
    if !out.ends_with('\n') {
        out.push('\n');
    }
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = io::stdout().lock().write_all(out.as_bytes());
}

fn run(cli: Cli) -> Result<bool, Usage> {
    let as_json = cli.json;
    match cli.command {
        Command::Classify { file } => {
            let p = load(&file)?;
            let report = classify(&p.ontology);
            emit(as_json, js::document("classify", report.to_json()), report.to_string());
            Ok(true)
        }
        Command::Chase {
            file,
            mode,
            max_atoms,
            max_rounds,
            steps,
        } => {
            let p = load(&file)?;
            let cfg = ChaseConfig {
                mode: mode.into(),
                max_atoms,
                max_rounds: max_rounds.unwrap_or(usize::MAX),
                injective: false,
            };
            let res = run_chase(&p.database, &p.ontology, &cfg);
            let mut text = String::new();
            if steps {
                for s in &res.steps {
                    text.push_str(&format!("round {} {} {} => {}\n", s.round, s.rule, s.mapping, s.atom));
                }
            }
            text.push_str(&res.instance.to_string());
            text.push_str(&format!(
                "% {} atoms, {} rounds, {}\n",
                res.instance.len(),
                res.rounds,
                if res.terminated {
                    "terminated"
                } else {
                    "stopped at a bound"
                }
            ));
            let value = js::document(
                "chase",
                json!({
                    "terminated": res.terminated,
                    "rounds": res.rounds,
                    "round_sizes": res.round_sizes,
                    "instance": js::instance(&res.instance),
                    "steps": if steps {
                        res.steps.iter().map(|s| json!({
                            "rule": s.rule,
                            "round": s.round,
                            "mapping": js::mapping(&s.mapping),
                            "atom": js::atom(&s.atom),
                        })).collect::<Vec<_>>()
                    } else {
                        Vec::new()
                    },
                }),
            );
            emit(as_json, value, text);
            Ok(true)
        }
        Command::Answer {
            file,
            query,
            mode,
            max_atoms,
        } => {
            let p = load(&file)?;
            let cfg = ChaseConfig {
                mode: mode.into(),
                max_atoms,
                ..ChaseConfig::default()
            };
            let mut text = String::new();
            let mut rows = Vec::new();
            for i in pick_queries(&p, query)? {
                let q = &p.queries[i];
                let verdict = entails(&p.database, &p.ontology, q, &cfg);
                let witness = match &verdict {
                    Entailment::True(w) => Some(w),
                    _ => None,
                };
                text.push_str(&format!("query {}: {} {q}", i + 1, verdict.as_str()));
                if let Some(w) = witness {
                    text.push_str(&format!("  witness {}", w.mapping));
                }
                text.push('\n');
                rows.push(json!({
                    "query": i + 1,
                    "text": q.to_string(),
                    "verdict": verdict.as_str(),
                    "witness": witness.map(|w| json!({"disjunct": w.disjunct + 1, "mapping": js::mapping(&w.mapping)})),
                }));
            }
            emit(as_json, js::document("answer", json!({ "answers": rows })), text);
            Ok(true)
        }
        Command::Rewrite { file, partition } => {
            let p = load(&file)?;
            let c = rewrite_program(&p)?;
            let canonical = c.as_program();
            let (text, value) = if partition {
                let (active, harmless) = partition_active_harmless(&c.ontology);
                let mut text = String::new();
                for a in c.database.iter() {
                    text.push_str(&format!("{a}.\n"));
                }
                text.push_str(&format!("\n% active ({})\n", active.len()));
                for r in &active.rules {
                    text.push_str(&format!("{r}\n"));
                }
                text.push_str(&format!("\n% harmless ({})\n", harmless.len()));
                for r in &harmless.rules {
                    text.push_str(&format!("{r}\n"));
                }
                for q in &c.queries {
                    text.push_str(&format!("\n{q}"));
                }
                let value = json!({
                    "database": js::instance(c.database.instance()),
                    "active": js::ontology(&active),
                    "harmless": js::ontology(&harmless),
                    "queries": c.queries.iter().map(js::query).collect::<Vec<_>>(),
                });
                (text, value)
            } else {
                (print_program(&canonical), js::program(&canonical))
            };
            emit(as_json, js::document("rewrite", value), text);
            Ok(true)
        }
        Command::FcCheck {
            file,
            max_nulls,
            max_atoms,
            query,
            chase_limit,
        } => {
            let p = load(&file)?;
            let budget = Budget::new(max_nulls, max_atoms);
            let mut text = String::new();
            let mut rows = Vec::new();
            let mut sound = true;
            for i in pick_queries(&p, query)? {
                let q = &p.queries[i];
                let verdict = entails(&p.database, &p.ontology, q, &ChaseConfig::restricted(chase_limit));
                let found = find_finite_countermodel(&p.database, &p.ontology, q, budget);
                let status = match (&verdict, &found) {
                    (Entailment::True(_), Some(_)) => {
                        sound = false;
                        "unsound"
                    }
                    (Entailment::True(_), None) => "agree",
                    (Entailment::False, Some(_)) => "agree",
                    (Entailment::False, None) => "no countermodel within budget",
                    (Entailment::Unknown, _) => "chase inconclusive",
                };
                text.push_str(&format!(
                    "query {}: chase {}, countermodel {}, {status}\n",
                    i + 1,
                    verdict.as_str(),
                    if found.is_some() { "found" } else { "none" }
                ));
                if let Some(m) = &found {
                    for a in m.sorted() {
                        text.push_str(&format!("    {a}.\n"));
                    }
                }
                rows.push(json!({
                    "query": i + 1,
                    "chase": verdict.as_str(),
                    "countermodel": found.as_ref().map(js::instance),
                    "status": status,
                }));
            }
            emit(as_json, js::document("fc-check", json!({ "queries": rows })), text);
            Ok(sound)
        }
        Command::Harness {
            suite,
            seed,
            count,
            mutate,
            config,
        } => {
            let config = match config {
                Some(path) => {
                    let text = fs::read_to_string(&path).with_context(|| format!("cannot read {}", path.display()))?;
                    GeneratorConfig::parse(&text)?
                }
                None => GeneratorConfig::default(),
            };
            let opts = HarnessOptions {
                seed,
                count,
                mutate,
                config,
            };
            let report = run_suite(suite, &opts);
            emit(as_json, report.to_json(), report.to_string());
            Ok(report.passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
