//! Batch front end: reads a database (or graph) and example files, runs the
//! test for the requested class and renders the verdict as JSON.

mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde_json::{json, Map, Value};

use qbe_core::{
    product, CanonicalExplanation, Class, Database, Element, Engine, ExampleSets,
    GraphDatabase, Limits, PointedDatabase, PointedGraph, Tuple, Verdict, Witness,
};
use qbe_oracle::{all_homs, game_tree_pebble, game_tree_strong, strong_hom_exists};

pub use parse::{
    parse_database, parse_database_str, parse_examples, parse_examples_str, parse_graph,
    parse_graph_str,
};

pub const EXIT_ACCEPT: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_REJECT: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },
    #[error("{file}: {error}")]
    Input { file: String, error: qbe_core::Error },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] qbe_core::Error),
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Model {
    Relational,
    Graph,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Task {
    Qbe,
    Define,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub model: Model,
    pub task: Task,
    pub class: Class,
    pub db: PathBuf,
    pub pos: PathBuf,
    /// Ignored by definability, which tests every tuple outside the positives.
    pub neg: Option<PathBuf>,
    pub emit_witness: bool,
    pub emit_eval: bool,
    pub emit_canonical: bool,
    pub emit_timings: bool,
    pub budget_nodes: Option<usize>,
    pub budget_seconds: Option<f64>,
    /// Decide with the brute-force oracles instead of the solvers. Only the
    /// verdict changes route; they are exponential, so keep inputs tiny.
    pub oracle: bool,
}

impl RunConfig {
    pub fn new(model: Model, task: Task, class: Class, db: impl Into<PathBuf>, pos: impl Into<PathBuf>) -> Self {
        RunConfig {
            model,
            task,
            class,
            db: db.into(),
            pos: pos.into(),
            neg: None,
            emit_witness: false,
            emit_eval: false,
            emit_canonical: false,
            emit_timings: false,
            budget_nodes: None,
            budget_seconds: None,
            oracle: false,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        match (self.model, self.class.is_graph()) {
            (Model::Relational, true) => {
                return Err(CliError::usage(format!("class {} needs --model graph", self.class)))
            }
            (Model::Graph, false) => {
                return Err(CliError::usage(format!("class {} needs --model relational", self.class)))
            }
            _ => {}
        }
        self.class.game_parameter()?;
        if self.emit_canonical && !matches!(self.class, Class::Cq | Class::Ucq) {
            return Err(CliError::usage("--emit-canonical is only defined for cq and ucq"));
        }
        if self.emit_eval && self.class == Class::Crpq {
            return Err(CliError::usage(
                "--emit-eval is not available for crpq; use ctw:<k> for a bounded evaluation",
            ));
        }
        if self.task == Task::Define && self.neg.is_some() {
            return Err(CliError::usage("--neg has no meaning for --task define"));
        }
        if let Some(s) = self.budget_seconds {
            if !(s.is_finite() && s >= 0.0) {
                return Err(CliError::usage("--budget-seconds must be a non-negative number"));
            }
        }
        Ok(())
    }

    fn limits(&self, start: Instant) -> Limits {
        Limits {
            node_budget: self.budget_nodes.unwrap_or(qbe_core::DEFAULT_NODE_BUDGET),
            deadline: self.budget_seconds.map(|s| start + Duration::from_secs_f64(s)),
        }
    }
}

/// What `run` produced: the process exit status and the JSON report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub exit: i32,
    pub json: String,
}

/// A failure after the inputs were read; `stats` describes how far it got.
#[derive(Debug)]
pub struct RunError {
    pub error: CliError,
    pub stats: Option<Value>,
}

impl From<CliError> for RunError {
    fn from(error: CliError) -> Self {
        RunError { error, stats: None }
    }
}

impl From<qbe_core::Error> for RunError {
    fn from(error: qbe_core::Error) -> Self {
        CliError::from(error).into()
    }
}

/// Elements and nodes as the two models name them.
trait Names {
    fn size(&self) -> usize;
    fn tuple_of(&self, names: &[String]) -> qbe_core::Result<Tuple>;
    fn names_of(&self, t: &Tuple) -> Vec<String>;
}

impl Names for Database {
    fn size(&self) -> usize {
        self.domain_size()
    }
    fn tuple_of(&self, names: &[String]) -> qbe_core::Result<Tuple> {
        self.tuple(names)
    }
    fn names_of(&self, t: &Tuple) -> Vec<String> {
        self.tuple_names(t)
    }
}

impl Names for GraphDatabase {
    fn size(&self) -> usize {
        self.node_count()
    }
    fn tuple_of(&self, names: &[String]) -> qbe_core::Result<Tuple> {
        self.tuple(names)
    }
    fn names_of(&self, t: &Tuple) -> Vec<String> {
        self.tuple_names(t)
    }
}

fn examples<N: Names>(cfg: &RunConfig, data: &N) -> Result<ExampleSets, CliError> {
    let source = |p: &PathBuf| p.display().to_string();
    let resolve = |path: &PathBuf, rows: Vec<Vec<String>>| -> Result<Vec<Tuple>, CliError> {
        rows.iter()
            .map(|r| data.tuple_of(r))
            .collect::<qbe_core::Result<Vec<_>>>()
            .map_err(|error| CliError::Input {
                file: source(path),
                error,
            })
    };
    let pos = resolve(&cfg.pos, parse_examples(&cfg.pos)?)?;
    let neg = match &cfg.neg {
        Some(p) => resolve(p, parse_examples(p)?)?,
        None => Vec::new(),
    };
    if let (Some(p), Some(n)) = (pos.first(), neg.first()) {
        if p.arity() != n.arity() {
            return Err(CliError::usage(format!(
                "positive examples have arity {}, negative examples arity {}",
                p.arity(),
                n.arity()
            )));
        }
    }
    ExampleSets::new(data.size(), pos, neg).map_err(|error| CliError::Input {
        file: source(&cfg.pos),
        error,
    })
}

fn names_json<N: Names>(data: &N, t: &Tuple) -> Value {
    json!(data.names_of(t))
}

fn tuples_json<N: Names>(data: &N, tuples: &BTreeSet<Tuple>) -> Value {
    // sorted by name so the report does not depend on interning
    let named: BTreeSet<Vec<String>> = tuples.iter().map(|t| data.names_of(t)).collect();
    json!(named)
}

fn assignment_json(map: &Option<BTreeMap<Element, Element>>) -> Value {
    match map {
        None => Value::Null,
        Some(m) => Value::Object(
            m.iter()
                .map(|(a, b)| (a.to_string(), Value::String(b.to_string())))
                .collect::<Map<String, Value>>(),
        ),
    }
}

fn witness_json<N: Names>(data: &N, w: &Witness, with_assignment: bool) -> Value {
    let mut obj = Map::new();
    obj.insert("kind".into(), json!(w.kind()));
    match w {
        Witness::UnsafeProduct => {}
        Witness::FailingNegative { tuple, assignment } => {
            obj.insert("tuple".into(), names_json(data, tuple));
            if with_assignment {
                obj.insert("assignment".into(), assignment_json(assignment));
            }
        }
        Witness::FailingPair {
            positive,
            negative,
            assignment,
        } => {
            obj.insert("positive".into(), names_json(data, positive));
            obj.insert("negative".into(), names_json(data, negative));
            if with_assignment {
                obj.insert("assignment".into(), assignment_json(assignment));
            }
        }
    }
    Value::Object(obj)
}

fn query_json(q: &PointedDatabase) -> Value {
    let atoms: BTreeSet<String> = q.db.atoms().iter().map(|a| q.db.atom_string(a)).collect();
    json!({ "atoms": atoms, "free": q.db.tuple_names(&q.point) })
}

fn canonical_json(c: &CanonicalExplanation) -> Value {
    match c {
        CanonicalExplanation::Cq(q) => {
            let mut v = query_json(q);
            v["kind"] = json!("cq");
            v
        }
        CanonicalExplanation::Ucq(qs) => json!({
            "kind": "ucq",
            "disjuncts": qs.iter().map(query_json).collect::<Vec<_>>(),
        }),
    }
}

/// Tuples the decision compares the positives against.
fn targets(size: usize, ex: &ExampleSets, task: Task) -> Vec<Tuple> {
    match task {
        Task::Qbe => ex.negative().iter().cloned().collect(),
        Task::Define => {
            let mut out = Vec::new();
            let mut pick = vec![0u32; ex.arity()];
            if size == 0 {
                return out;
            }
            loop {
                let t = Tuple(pick.iter().map(|&i| qbe_core::ElemId(i)).collect());
                if !ex.positive().contains(&t) {
                    out.push(t);
                }
                let mut j = pick.len();
                loop {
                    if j == 0 {
                        return out;
                    }
                    j -= 1;
                    pick[j] += 1;
                    if (pick[j] as usize) < size {
                        break;
                    }
                    pick[j] = 0;
                }
            }
        }
    }
}

fn oracle_relational(db: &Arc<Database>, ex: &ExampleSets, cfg: &RunConfig) -> Result<Verdict, CliError> {
    let pebbles = cfg.class.game_parameter()?;
    let against = targets(db.domain_size(), ex, cfg.task);
    let pointed = |t: &Tuple| PointedDatabase {
        db: db.clone(),
        point: t.clone(),
    };
    let maps = |src: &PointedDatabase, dst: &PointedDatabase| match pebbles {
        None => !all_homs(src, dst).is_empty(),
        Some(k) => game_tree_pebble(src, dst, k, None),
    };
    match cfg.class {
        Class::Cq | Class::Tw(_) => {
            let factors: Vec<PointedDatabase> = ex.positive().iter().map(pointed).collect();
            let Some(src) = product(&factors)?.pointed() else {
                return Ok(Verdict::reject(Witness::UnsafeProduct));
            };
            for b in &against {
                if maps(&src, &pointed(b)) {
                    return Ok(Verdict::reject(Witness::FailingNegative {
                        tuple: b.clone(),
                        assignment: None,
                    }));
                }
            }
        }
        _ => {
            for a in ex.positive() {
                for b in &against {
                    if maps(&pointed(a), &pointed(b)) {
                        return Ok(Verdict::reject(Witness::FailingPair {
                            positive: a.clone(),
                            negative: b.clone(),
                            assignment: None,
                        }));
                    }
                }
            }
        }
    }
    Ok(Verdict::accept())
}

fn oracle_graph(g: &Arc<GraphDatabase>, ex: &ExampleSets, cfg: &RunConfig) -> Result<Verdict, CliError> {
    let pebbles = cfg.class.game_parameter()?;
    let pointed = |t: &Tuple| PointedGraph {
        graph: g.clone(),
        point: t.clone(),
    };
    let factors: Vec<PointedGraph> = ex.positive().iter().map(pointed).collect();
    for b in targets(g.node_count(), ex, cfg.task) {
        let target = pointed(&b);
        let maps = match pebbles {
            None => strong_hom_exists(&factors, &target),
            Some(k) => game_tree_strong(&factors, &target, k, None),
        };
        if maps {
            return Ok(Verdict::reject(Witness::FailingNegative {
                tuple: b,
                assignment: None,
            }));
        }
    }
    Ok(Verdict::accept())
}

struct Outcome {
    accepted: bool,
    witness: Option<Value>,
    canonical: Option<Value>,
    evaluation: Option<Value>,
    stats: Map<String, Value>,
}

fn failed(stats: &Map<String, Value>) -> impl Fn(qbe_core::Error) -> RunError + '_ {
    move |e| RunError {
        error: e.into(),
        stats: Some(Value::Object(stats.clone())),
    }
}

fn route(cfg: &RunConfig) -> Value {
    json!(if cfg.oracle { "oracle" } else { "solver" })
}

fn run_relational(cfg: &RunConfig, engine: &Engine) -> Result<Outcome, RunError> {
    let db = Arc::new(parse_database(&cfg.db)?);
    let ex = examples(cfg, &*db)?;
    let mut stats = Map::new();
    stats.insert("domain".into(), json!(db.domain_size()));
    stats.insert("atoms".into(), json!(db.len()));
    stats.insert("positives".into(), json!(ex.positive().len()));
    stats.insert("compared".into(), json!(targets(db.domain_size(), &ex, cfg.task).len()));
    stats.insert("route".into(), route(cfg));
    let verdict = if cfg.oracle {
        oracle_relational(&db, &ex, cfg)?
    } else {
        match cfg.task {
            Task::Qbe => engine.qbe(&db, &ex, cfg.class),
            Task::Define => engine.define(&db, &ex, cfg.class),
        }
        .map_err(failed(&stats))?
    };
    let mut canonical = None;
    let mut evaluation = None;
    if verdict.accepted && (cfg.emit_canonical || cfg.emit_eval) {
        let explanation = match cfg.class {
            Class::Cq | Class::Ucq => Some(
                match cfg.task {
                    Task::Qbe => engine.canonical_explanation(&db, &ex, cfg.class),
                    Task::Define => engine.canonical_definition(&db, &ex, cfg.class),
                }
                .map_err(failed(&stats))?,
            ),
            _ => None,
        };
        if cfg.emit_canonical {
            canonical = explanation.as_ref().map(canonical_json);
        }
        if cfg.emit_eval {
            let result = match (&explanation, cfg.class) {
                (Some(c), _) => c.evaluate(&db),
                (None, Class::Tw(k)) => engine.evaluate_tw_explanation(&db, &ex, k),
                (None, Class::Utw(k)) => engine.evaluate_utw_explanation(&db, &ex, k),
                _ => unreachable!("relational classes are covered"),
            }
            .map_err(failed(&stats))?;
            evaluation = Some(tuples_json(&*db, &result));
        }
    }
    Ok(Outcome {
        accepted: verdict.accepted,
        witness: verdict.witness.as_ref().map(|w| witness_json(&*db, w, cfg.emit_witness)),
        canonical,
        evaluation,
        stats,
    })
}

fn run_graph(cfg: &RunConfig, engine: &Engine) -> Result<Outcome, RunError> {
    let g = Arc::new(parse_graph(&cfg.db)?);
    let ex = examples(cfg, &*g)?;
    let mut stats = Map::new();
    stats.insert("nodes".into(), json!(g.node_count()));
    stats.insert("edges".into(), json!(g.edge_count()));
    stats.insert("positives".into(), json!(ex.positive().len()));
    stats.insert("compared".into(), json!(targets(g.node_count(), &ex, cfg.task).len()));
    let product_nodes = (g.node_count() as u128).checked_pow(ex.positive().len() as u32);
    stats.insert(
        "product_nodes".into(),
        product_nodes.map_or(Value::Null, |n| json!(n.to_string())),
    );
    stats.insert("route".into(), route(cfg));
    let verdict = if cfg.oracle {
        oracle_graph(&g, &ex, cfg)?
    } else {
        let (verdict, cache) = engine
            .graph_test(&g, &ex, cfg.class, cfg.task == Task::Define)
            .map_err(failed(&stats))?;
        // under parallel checking these depend on scheduling
        if cfg.emit_timings {
            stats.insert("cache_hits".into(), json!(cache.hits));
            stats.insert("cache_rows".into(), json!(cache.rows));
        }
        verdict
    };
    let mut evaluation = None;
    if verdict.accepted && cfg.emit_eval {
        if let Class::Ctw(k) = cfg.class {
            let result = engine
                .evaluate_ctw_explanation(&g, &ex, k)
                .map_err(failed(&stats))?;
            evaluation = Some(tuples_json(&*g, &result));
        }
    }
    Ok(Outcome {
        accepted: verdict.accepted,
        witness: verdict.witness.as_ref().map(|w| witness_json(&*g, w, cfg.emit_witness)),
        canonical: None,
        evaluation,
        stats,
    })
}

/// Runs one test and renders the report. Errors map to exit status 1.
pub fn run(cfg: &RunConfig) -> Result<Report, RunError> {
    cfg.validate()?;
    let start = Instant::now();
    let engine = Engine::new(cfg.limits(start));
    let outcome = match cfg.model {
        Model::Relational => run_relational(cfg, &engine),
        Model::Graph => run_graph(cfg, &engine),
    };
    let elapsed = start.elapsed();
    let mut outcome = outcome.map_err(|mut e| {
        if let (true, Some(Value::Object(stats))) = (cfg.emit_timings, e.stats.as_mut()) {
            stats.insert("elapsed_ms".into(), json!(elapsed.as_millis() as u64));
        }
        e
    })?;
    if cfg.emit_timings {
        outcome.stats.insert("elapsed_ms".into(), json!(elapsed.as_millis() as u64));
    }
    let report = json!({
        "accepted": outcome.accepted,
        "canonical": outcome.canonical,
        "class": cfg.class.to_string(),
        "evaluation": outcome.evaluation,
        "stats": outcome.stats,
        "witness": outcome.witness,
    });
    let mut text = serde_json::to_string_pretty(&report).expect("values serialize");
    text.push('\n');
    Ok(Report {
        exit: if outcome.accepted { EXIT_ACCEPT } else { EXIT_REJECT },
        json: text,
    })
}

/// The parsed input printed back in its own syntax.
pub fn dump(model: Model, path: &std::path::Path) -> Result<String, CliError> {
    Ok(match model {
        Model::Relational => parse_database(path)?.to_string(),
        Model::Graph => parse_graph(path)?.to_string(),
    })
}
