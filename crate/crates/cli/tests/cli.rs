use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Out {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", self.stdout))
    }
}

fn qbe(args: &[&str]) -> Out {
    let out = Command::new(env!("CARGO_BIN_EXE_qbe")).args(args).output().unwrap();
    Out {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn relational(class: &str, db: &str, pos: &str, neg: Option<&str>, extra: &[&str]) -> Out {
    let (db, pos) = (fixture(db), fixture(pos));
    let neg = neg.map(fixture);
    let mut args = vec!["--class", class, "--db", &db, "--pos", &pos];
    if let Some(n) = &neg {
        args.extend(["--neg", n.as_str()]);
    }
    args.extend(extra);
    qbe(&args)
}

fn graph(class: &str, stem: &str, extra: &[&str]) -> Out {
    let (db, pos, neg) = (
        fixture(&format!("{stem}.graph")),
        fixture(&format!("{stem}.pos")),
        fixture(&format!("{stem}.neg")),
    );
    let mut args = vec!["--model", "graph", "--class", class, "--db", &db, "--pos", &pos, "--neg", &neg];
    args.extend(extra);
    qbe(&args)
}

#[test]
fn unsafe_product_rejects() {
    let out = relational("cq", "unsafe.db", "unsafe.pos", None, &[]);
    assert_eq!(out.code, 2, "{}", out.stderr);
    let v = out.json();
    assert_eq!(v["accepted"], false);
    assert_eq!(v["class"], "cq");
    assert_eq!(v["witness"], serde_json::json!({"kind": "unsafe-product"}));
    assert_eq!(v["canonical"], Value::Null);
}

#[test]
fn safe_product_without_negatives_accepts() {
    let out = relational("cq", "path.db", "path.pos", None, &["--emit-canonical", "--emit-eval"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v = out.json();
    assert_eq!(v["witness"], Value::Null);
    assert_eq!(v["canonical"]["kind"], "cq");
    assert_eq!(v["canonical"]["free"], serde_json::json!(["a"]));
    assert_eq!(v["evaluation"], serde_json::json!([["a"]]));
}

#[test]
fn cliques_fixture_verdicts() {
    let out = relational("ucq", "cliques.db", "cliques.pos", Some("cliques.neg"), &[]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let out = graph("crpq", "cliques", &[]);
    assert_eq!(out.code, 2, "{}", out.stderr);
    let v = out.json();
    assert_eq!(v["witness"]["kind"], "failing-negative");
    assert_eq!(v["witness"]["tuple"], serde_json::json!(["1''"]));
    assert!(v["witness"].get("assignment").is_none());
}

#[test]
fn cliques_encodings_agree() {
    let g = qbe_cli::parse_graph(fixture("cliques.graph").as_ref()).unwrap();
    let db = qbe_cli::parse_database(fixture("cliques.db").as_ref()).unwrap();
    assert_eq!(g.to_database(), db);
}

#[test]
fn pebble_gap_fixture() {
    let code = |class| relational(class, "gap.db", "gap.pos", Some("gap.neg"), &[]).code;
    assert_eq!(code("cq"), 0);
    assert_eq!(code("tw:1"), 2);
    assert_eq!(code("tw:2"), 0);
    assert_eq!(code("ucq"), 0);
    assert_eq!(code("utw:1"), 2);
}

#[test]
fn strong_gap_fixture() {
    assert_eq!(graph("crpq", "strong_gap", &[]).code, 0);
    assert_eq!(graph("ctw:1", "strong_gap", &[]).code, 2);
    assert_eq!(graph("ctw:2", "strong_gap", &[]).code, 0);
}

#[test]
fn witness_assignment_on_request() {
    let out = relational("cq", "cliques.db", "cliques.pos", Some("cliques.neg"), &["--emit-witness"]);
    assert_eq!(out.code, 2);
    let w = &out.json()["witness"];
    assert_eq!(w["kind"], "failing-negative");
    // the product point goes to the negative
    assert_eq!(w["assignment"]["(1,1')"], "1''");
    let out = relational("tw:1", "gap.db", "gap.pos", Some("gap.neg"), &["--emit-witness"]);
    assert_eq!(out.json()["witness"]["assignment"], Value::Null);
}

#[test]
fn evaluation_contract_on_fixtures() {
    let out = relational("tw:2", "gap.db", "gap.pos", Some("gap.neg"), &["--emit-eval"]);
    let eval = out.json()["evaluation"].clone();
    let eval: Vec<Vec<String>> = serde_json::from_value(eval).unwrap();
    assert!(eval.contains(&vec!["a".to_owned()]));
    assert!(!eval.contains(&vec!["b".to_owned()]));

    let out = graph("ctw:2", "strong_gap", &["--emit-eval"]);
    let eval: Vec<Vec<String>> = serde_json::from_value(out.json()["evaluation"].clone()).unwrap();
    assert!(eval.contains(&vec!["1".to_owned()]) && eval.contains(&vec!["2".to_owned()]));
    assert!(!eval.contains(&vec!["0".to_owned()]));
}

#[test]
fn definability_task() {
    let db = fixture("path.db");
    let pos = fixture("path.pos");
    let out = qbe(&["--task", "define", "--class", "cq", "--db", &db, "--pos", &pos, "--emit-eval"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.json()["evaluation"], serde_json::json!([["a"]]));
    let neg = fixture("gap.neg");
    let out = qbe(&["--task", "define", "--class", "cq", "--db", &db, "--pos", &pos, "--neg", &neg]);
    assert_eq!(out.code, 1);
}

#[test]
fn oracle_route_agrees() {
    type Run = Box<dyn Fn(&[&str]) -> Out>;
    let runs: Vec<(&str, Run)> = vec![
        ("cq", Box::new(|x: &[&str]| relational("cq", "unsafe.db", "unsafe.pos", None, x))),
        ("tw:1", Box::new(|x: &[&str]| relational("tw:1", "gap.db", "gap.pos", Some("gap.neg"), x))),
        ("tw:2", Box::new(|x: &[&str]| relational("tw:2", "gap.db", "gap.pos", Some("gap.neg"), x))),
        ("utw:1", Box::new(|x: &[&str]| relational("utw:1", "gap.db", "gap.pos", Some("gap.neg"), x))),
        ("ucq", Box::new(|x: &[&str]| relational("ucq", "gap.db", "gap.pos", Some("gap.neg"), x))),
        ("crpq", Box::new(|x: &[&str]| graph("crpq", "tiny", x))),
        ("ctw:1 tiny", Box::new(|x: &[&str]| graph("ctw:1", "tiny", x))),
        ("ctw:1", Box::new(|x: &[&str]| graph("ctw:1", "strong_gap", x))),
        ("ctw:2", Box::new(|x: &[&str]| graph("ctw:2", "strong_gap", x))),
    ];
    for (name, run) in runs {
        let (a, b) = (run(&[]), run(&["--oracle"]));
        assert_eq!(a.code, b.code, "{name}");
        let (a, b) = (a.json(), b.json());
        assert_eq!(a["witness"], b["witness"], "{name}");
        assert_eq!(b["stats"]["route"], "oracle");
    }
}

#[test]
fn usage_errors_exit_one() {
    let db = fixture("unsafe.db");
    let pos = fixture("unsafe.pos");
    let graph_db = fixture("c6.graph");
    let cases: Vec<Vec<&str>> = vec![
        vec!["--class", "crpq", "--db", &db, "--pos", &pos],
        vec!["--model", "graph", "--class", "cq", "--db", &graph_db, "--pos", &pos],
        vec!["--class", "tw:1", "--db", &db, "--pos", &pos, "--emit-canonical"],
        vec!["--model", "graph", "--class", "crpq", "--db", &graph_db, "--pos", &pos, "--emit-eval"],
        vec!["--class", "tw:0", "--db", &db, "--pos", &pos],
        vec!["--class", "cq", "--db", "/nonexistent", "--pos", &pos],
    ];
    for args in cases {
        let out = qbe(&args);
        assert_ne!(out.code, 0, "{args:?}");
        assert_ne!(out.code, 2, "{args:?}");
        assert!(!out.stderr.is_empty());
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn input_errors_report_lines() {
    let dir = std::env::temp_dir().join(format!("qbe-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.db");
    std::fs::write(&bad, "R(a,b)\n# fine\nR a b\n").unwrap();
    let pos = dir.join("pos");
    std::fs::write(&pos, "(a,b)\n").unwrap();
    let out = qbe(&["--class", "cq", "--db", bad.to_str().unwrap(), "--pos", pos.to_str().unwrap()]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("bad.db:3:"), "{}", out.stderr);

    let unknown = dir.join("unknown");
    std::fs::write(&unknown, "(a,z)\n").unwrap();
    let db = fixture("unsafe.db");
    let out = qbe(&["--class", "cq", "--db", &db, "--pos", unknown.to_str().unwrap()]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("unknown element `z`"), "{}", out.stderr);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn budgets_are_errors() {
    let out = graph("crpq", "cliques", &["--budget-nodes", "50"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("budget"), "{}", out.stderr);
    assert!(out.stderr.contains("partial stats"), "{}", out.stderr);
    let out = graph("crpq", "cliques", &["--budget-seconds", "0"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("time budget"), "{}", out.stderr);
}

#[test]
fn timings_only_on_request() {
    let out = graph("crpq", "strong_gap", &[]);
    assert!(out.json()["stats"].get("elapsed_ms").is_none());
    let out = graph("crpq", "strong_gap", &["--emit-timings"]);
    let stats = &out.json()["stats"];
    assert!(stats.get("elapsed_ms").is_some());
    assert!(stats.get("cache_rows").is_some());
}

#[test]
fn dump_round_trips() {
    for (model, name) in [("relational", "gap.db"), ("relational", "cliques.db"), ("graph", "cliques.graph")] {
        let path = fixture(name);
        let first = qbe(&["--model", model, "--dump", "--db", &path]);
        assert_eq!(first.code, 0);
        let copy = std::env::temp_dir().join(format!("qbe-dump-{}-{name}", std::process::id()));
        std::fs::write(&copy, &first.stdout).unwrap();
        let second = qbe(&["--model", model, "--dump", "--db", copy.to_str().unwrap()]);
        std::fs::remove_file(&copy).unwrap();
        assert_eq!(first.stdout, second.stdout);
    }
}

#[test]
fn repeated_runs_are_identical() {
    for _ in 0..2 {
        let a = graph("crpq", "cliques", &["--emit-witness"]);
        let b = graph("crpq", "cliques", &["--emit-witness"]);
        assert_eq!(a.stdout, b.stdout);
    }
}
