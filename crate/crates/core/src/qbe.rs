//! Query-by-example and definability tests over relational databases.
//!
//! Every test compares the positive examples, either synchronized into one
//! direct product or taken one at a time, against each negative tuple (or
//! each tuple outside the positives, for definability). The comparison is
//! a homomorphism test or its k-pebble relaxation. The four combinations
//! characterize explanations in CQ, TW(k), UCQ and UTW(k); callers that
//! speak in treewidth use [`Class`], which maps TW(k) to the (k+1)-pebble
//! game.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hom::{evaluate_cq, find_hom};
use crate::limits::Limits;
use crate::model::{advance, product, Database, ElemId, Element, ExampleSets, PointedDatabase, Product, Tuple};
use crate::pebble::{pebble_closure, pebble_game};

/// Query classes, each decided by one test.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Class {
    Cq,
    Tw(usize),
    Ucq,
    Utw(usize),
    Crpq,
    Ctw(usize),
}

impl Class {
    pub fn is_graph(self) -> bool {
        matches!(self, Class::Crpq | Class::Ctw(_))
    }

    pub fn treewidth(self) -> Option<usize> {
        match self {
            Class::Tw(k) | Class::Utw(k) | Class::Ctw(k) => Some(k),
            _ => None,
        }
    }

    /// Number of pebbles of the game deciding the class, if it is relaxed.
    pub fn game_parameter(self) -> Result<Option<usize>> {
        match self.treewidth() {
            Some(0) => Err(Error::Treewidth(0)),
            Some(k) => Ok(Some(k + 1)),
            None => Ok(None),
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Class::Cq => f.write_str("cq"),
            Class::Tw(k) => write!(f, "tw:{k}"),
            Class::Ucq => f.write_str("ucq"),
            Class::Utw(k) => write!(f, "utw:{k}"),
            Class::Crpq => f.write_str("crpq"),
            Class::Ctw(k) => write!(f, "ctw:{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseClassError(pub String);

impl fmt::Display for ParseClassError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknown class `{}` (expected cq, ucq, crpq, tw:<k>, utw:<k> or ctw:<k> with k >= 1)",
            self.0
        )
    }
}

impl std::error::Error for ParseClassError {}

impl FromStr for Class {
    type Err = ParseClassError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let bad = || ParseClassError(s.to_owned());
        match s {
            "cq" => return Ok(Class::Cq),
            "ucq" => return Ok(Class::Ucq),
            "crpq" => return Ok(Class::Crpq),
            _ => {}
        }
        let (name, k) = s.split_once(':').ok_or_else(bad)?;
        let k: usize = k.parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        match name {
            "tw" => Ok(Class::Tw(k)),
            "utw" => Ok(Class::Utw(k)),
            "ctw" => Ok(Class::Ctw(k)),
            _ => Err(bad()),
        }
    }
}

/// Why a test rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// Some element of the product point occurs in no product atom.
    UnsafeProduct,
    /// The (product of the) positives maps to this tuple. The map is absent
    /// when the comparison was a pebble game.
    FailingNegative {
        tuple: Tuple,
        assignment: Option<BTreeMap<Element, Element>>,
    },
    /// A single positive maps to this tuple.
    FailingPair {
        positive: Tuple,
        negative: Tuple,
        assignment: Option<BTreeMap<Element, Element>>,
    },
}

impl Witness {
    pub fn kind(&self) -> &'static str {
        match self {
            Witness::UnsafeProduct => "unsafe-product",
            Witness::FailingNegative { .. } => "failing-negative",
            Witness::FailingPair { .. } => "failing-pair",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub accepted: bool,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn accept() -> Self {
        Verdict {
            accepted: true,
            witness: None,
        }
    }

    pub fn reject(witness: Witness) -> Self {
        Verdict {
            accepted: false,
            witness: Some(witness),
        }
    }
}

/// The canonical explanation of an accepted CQ or UCQ test: databases read
/// as queries, elements as variables and the point as the free tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CanonicalExplanation {
    Cq(PointedDatabase),
    Ucq(Vec<PointedDatabase>),
}

impl CanonicalExplanation {
    pub fn evaluate(&self, data: &Database) -> Result<BTreeSet<Tuple>> {
        match self {
            CanonicalExplanation::Cq(q) => evaluate_cq(q, data),
            CanonicalExplanation::Ucq(qs) => {
                let mut out = BTreeSet::new();
                for q in qs {
                    out.extend(evaluate_cq(q, data)?);
                }
                Ok(out)
            }
        }
    }
}

/// All tuples of `domain_size^arity` in lexicographic id order.
pub(crate) fn all_tuples(domain_size: usize, arity: usize) -> Vec<Tuple> {
    if domain_size == 0 {
        return Vec::new();
    }
    let lens = vec![domain_size; arity];
    let mut pick = vec![0usize; arity];
    let mut out = Vec::new();
    loop {
        out.push(Tuple(pick.iter().map(|&i| ElemId(i as u32)).collect()));
        if !advance(&mut pick, &lens) {
            return out;
        }
    }
}

pub(crate) fn outside(domain_size: usize, ex: &ExampleSets) -> Vec<Tuple> {
    all_tuples(domain_size, ex.arity())
        .into_iter()
        .filter(|t| !ex.positive().contains(t))
        .collect()
}

/// Runs `check` over `items` (possibly in parallel) and returns the first
/// failure in input order.
pub(crate) fn first_failure<T, W, F>(limits: &Limits, items: &[T], check: F) -> Result<Option<(usize, W)>>
where
    T: Sync,
    W: Send,
    F: Fn(&T) -> Result<Option<W>> + Sync,
{
    items
        .par_iter()
        .enumerate()
        .map(|(i, item)| {
            limits.check_deadline()?;
            Ok(check(item)?.map(|w| (i, w)))
        })
        .find_map_first(|r: Result<Option<(usize, W)>>| r.transpose())
        .transpose()
}

/// Test driver carrying resource limits.
#[derive(Copy, Clone, Debug, Default)]
pub struct Engine {
    pub limits: Limits,
}

/// How one pointed structure is compared with another.
#[derive(Copy, Clone, Debug)]
enum Comparison {
    Hom,
    Pebbles(usize),
}

impl Comparison {
    fn new(k: Option<usize>) -> Result<Self> {
        match k {
            None => Ok(Comparison::Hom),
            Some(k) if k < 2 => Err(Error::PebbleCount(k)),
            Some(k) => Ok(Comparison::Pebbles(k)),
        }
    }

    /// `Some(map)` when `src` maps to `dst`.
    fn maps(
        self,
        src: &PointedDatabase,
        dst: &PointedDatabase,
    ) -> Result<Option<Option<BTreeMap<Element, Element>>>> {
        match self {
            Comparison::Hom => Ok(find_hom(src, dst)?
                .map(|h| Some(h.named(src.db.elements(), dst.db.elements())))),
            Comparison::Pebbles(k) => Ok(pebble_game(src, dst, k)?.then_some(None)),
        }
    }
}

pub(crate) fn positive_product(db: &Arc<Database>, ex: &ExampleSets) -> Result<Product> {
    let factors: Vec<PointedDatabase> = ex
        .positive()
        .iter()
        .map(|a| PointedDatabase {
            db: db.clone(),
            point: a.clone(),
        })
        .collect();
    product(&factors)
}

fn check_examples(db: &Database, ex: &ExampleSets) -> Result<()> {
    // ExampleSets is validated against a domain size; make sure it was this one
    for t in ex.positive().iter().chain(ex.negative()) {
        if let Some(bad) = t.iter().find(|e| e.index() >= db.domain_size()) {
            return Err(Error::ElementOutOfRange(bad.0));
        }
    }
    Ok(())
}

impl Engine {
    pub fn new(limits: Limits) -> Self {
        Engine { limits }
    }

    fn synchronized(
        &self,
        db: &Arc<Database>,
        ex: &ExampleSets,
        against: &[Tuple],
        cmp: Comparison,
    ) -> Result<Verdict> {
        check_examples(db, ex)?;
        let prod = positive_product(db, ex)?;
        let Some(src) = prod.pointed() else {
            return Ok(Verdict::reject(Witness::UnsafeProduct));
        };
        let failure = first_failure(&self.limits, against, |b| {
            let dst = PointedDatabase {
                db: db.clone(),
                point: b.clone(),
            };
            cmp.maps(&src, &dst)
        })?;
        Ok(match failure {
            None => Verdict::accept(),
            Some((i, assignment)) => Verdict::reject(Witness::FailingNegative {
                tuple: against[i].clone(),
                assignment,
            }),
        })
    }

    fn desynchronized(
        &self,
        db: &Arc<Database>,
        ex: &ExampleSets,
        against: &[Tuple],
        cmp: Comparison,
    ) -> Result<Verdict> {
        check_examples(db, ex)?;
        let pairs: Vec<(&Tuple, &Tuple)> = ex
            .positive()
            .iter()
            .flat_map(|a| against.iter().map(move |b| (a, b)))
            .collect();
        let failure = first_failure(&self.limits, &pairs, |&(a, b)| {
            let src = PointedDatabase {
                db: db.clone(),
                point: a.clone(),
            };
            let dst = PointedDatabase {
                db: db.clone(),
                point: b.clone(),
            };
            cmp.maps(&src, &dst)
        })?;
        Ok(match failure {
            None => Verdict::accept(),
            Some((i, assignment)) => Verdict::reject(Witness::FailingPair {
                positive: pairs[i].0.clone(),
                negative: pairs[i].1.clone(),
                assignment,
            }),
        })
    }

    fn negatives(ex: &ExampleSets) -> Vec<Tuple> {
        ex.negative().iter().cloned().collect()
    }

    pub fn qbe_test_cq(&self, db: &Arc<Database>, ex: &ExampleSets) -> Result<Verdict> {
        self.synchronized(db, ex, &Self::negatives(ex), Comparison::Hom)
    }

    /// Definability ignores the negatives of `ex` and tests every tuple
    /// outside the positives.
    pub fn definability_test_cq(&self, db: &Arc<Database>, ex: &ExampleSets) -> Result<Verdict> {
        self.synchronized(db, ex, &outside(db.domain_size(), ex), Comparison::Hom)
    }

    /// `k` is the number of pebbles; TW(k) is decided with `k + 1`.
    pub fn qbe_test_pebble(&self, db: &Arc<Database>, ex: &ExampleSets, k: usize) -> Result<Verdict> {
        self.synchronized(db, ex, &Self::negatives(ex), Comparison::new(Some(k))?)
    }

    pub fn definability_test_pebble(
        &self,
        db: &Arc<Database>,
        ex: &ExampleSets,
        k: usize,
    ) -> Result<Verdict> {
        let cmp = Comparison::new(Some(k))?;
        self.synchronized(db, ex, &outside(db.domain_size(), ex), cmp)
    }

    pub fn qbe_test_desync(&self, db: &Arc<Database>, ex: &ExampleSets) -> Result<Verdict> {
        self.desynchronized(db, ex, &Self::negatives(ex), Comparison::Hom)
    }

    pub fn definability_test_desync(&self, db: &Arc<Database>, ex: &ExampleSets) -> Result<Verdict> {
        self.desynchronized(db, ex, &outside(db.domain_size(), ex), Comparison::Hom)
    }

    pub fn qbe_test_desync_pebble(
        &self,
        db: &Arc<Database>,
        ex: &ExampleSets,
        k: usize,
    ) -> Result<Verdict> {
        self.desynchronized(db, ex, &Self::negatives(ex), Comparison::new(Some(k))?)
    }

    pub fn definability_test_desync_pebble(
        &self,
        db: &Arc<Database>,
        ex: &ExampleSets,
        k: usize,
    ) -> Result<Verdict> {
        let cmp = Comparison::new(Some(k))?;
        self.desynchronized(db, ex, &outside(db.domain_size(), ex), cmp)
    }

    /// Dispatches a QBE question for a relational class.
    pub fn qbe(&self, db: &Arc<Database>, ex: &ExampleSets, class: Class) -> Result<Verdict> {
        let k = class.game_parameter()?;
        match class {
            Class::Cq => self.qbe_test_cq(db, ex),
            Class::Tw(_) => self.qbe_test_pebble(db, ex, k.unwrap()),
            Class::Ucq => self.qbe_test_desync(db, ex),
            Class::Utw(_) => self.qbe_test_desync_pebble(db, ex, k.unwrap()),
            Class::Crpq | Class::Ctw(_) => Err(Error::Precondition("graph class on a relational database")),
        }
    }

    /// Dispatches a definability question for a relational class.
    pub fn define(&self, db: &Arc<Database>, ex: &ExampleSets, class: Class) -> Result<Verdict> {
        let k = class.game_parameter()?;
        match class {
            Class::Cq => self.definability_test_cq(db, ex),
            Class::Tw(_) => self.definability_test_pebble(db, ex, k.unwrap()),
            Class::Ucq => self.definability_test_desync(db, ex),
            Class::Utw(_) => self.definability_test_desync_pebble(db, ex, k.unwrap()),
            Class::Crpq | Class::Ctw(_) => Err(Error::Precondition("graph class on a relational database")),
        }
    }

    fn canonical(&self, db: &Arc<Database>, ex: &ExampleSets, class: Class, define: bool) -> Result<CanonicalExplanation> {
        let verdict = match (class, define) {
            (Class::Cq, false) => self.qbe_test_cq(db, ex)?,
            (Class::Cq, true) => self.definability_test_cq(db, ex)?,
            (Class::Ucq, false) => self.qbe_test_desync(db, ex)?,
            (Class::Ucq, true) => self.definability_test_desync(db, ex)?,
            _ => return Err(Error::Precondition("canonical explanations exist for cq and ucq only")),
        };
        if !verdict.accepted {
            return Err(Error::Precondition("the test rejected; there is no explanation"));
        }
        Ok(match class {
            Class::Cq => CanonicalExplanation::Cq(
                positive_product(db, ex)?
                    .pointed()
                    .expect("an accepted test has a safe product"),
            ),
            _ => CanonicalExplanation::Ucq(
                ex.positive()
                    .iter()
                    .map(|a| PointedDatabase {
                        db: db.clone(),
                        point: a.clone(),
                    })
                    .collect(),
            ),
        })
    }

    /// The canonical CQ (the pointed product) or UCQ (one disjunct per
    /// positive) of an accepted QBE instance.
    pub fn canonical_explanation(
        &self,
        db: &Arc<Database>,
        ex: &ExampleSets,
        class: Class,
    ) -> Result<CanonicalExplanation> {
        self.canonical(db, ex, class, false)
    }

    /// As [`Engine::canonical_explanation`] for an accepted definability instance.
    pub fn canonical_definition(
        &self,
        db: &Arc<Database>,
        ex: &ExampleSets,
        class: Class,
    ) -> Result<CanonicalExplanation> {
        self.canonical(db, ex, class, true)
    }

    /// The result over `db` of some TW(k)-explanation: every tuple the
    /// positive product reaches under the (k+1)-pebble game. The query itself
    /// is never built.
    pub fn evaluate_tw_explanation(
        &self,
        db: &Arc<Database>,
        ex: &ExampleSets,
        k: usize,
    ) -> Result<BTreeSet<Tuple>> {
        if k == 0 {
            return Err(Error::Treewidth(0));
        }
        if !self.qbe_test_pebble(db, ex, k + 1)?.accepted {
            return Err(Error::Precondition("the (k+1)-pebble test rejected"));
        }
        let src = positive_product(db, ex)?
            .pointed()
            .expect("an accepted test has a safe product");
        self.reachable(&src, db, ex.arity(), k + 1)
    }

    /// The result over `db` of some UTW(k)-explanation: the union, over the
    /// positives, of the tuples each one reaches under the (k+1)-pebble game.
    pub fn evaluate_utw_explanation(
        &self,
        db: &Arc<Database>,
        ex: &ExampleSets,
        k: usize,
    ) -> Result<BTreeSet<Tuple>> {
        if k == 0 {
            return Err(Error::Treewidth(0));
        }
        if !self.qbe_test_desync_pebble(db, ex, k + 1)?.accepted {
            return Err(Error::Precondition("the desynchronized (k+1)-pebble test rejected"));
        }
        let mut out = BTreeSet::new();
        for a in ex.positive() {
            let src = PointedDatabase {
                db: db.clone(),
                point: a.clone(),
            };
            out.extend(self.reachable(&src, db, ex.arity(), k + 1)?);
        }
        Ok(out)
    }

    fn reachable(
        &self,
        src: &PointedDatabase,
        db: &Arc<Database>,
        arity: usize,
        pebbles: usize,
    ) -> Result<BTreeSet<Tuple>> {
        self.limits.check_deadline()?;
        let tuples = all_tuples(db.domain_size(), arity);
        let targets: Vec<PointedDatabase> = tuples
            .iter()
            .map(|t| PointedDatabase {
                db: db.clone(),
                point: t.clone(),
            })
            .collect();
        let wins = pebble_closure(src, &targets, pebbles)?;
        Ok(tuples
            .into_iter()
            .zip(wins)
            .filter_map(|(t, w)| w.then_some(t))
            .collect())
    }
}

macro_rules! default_engine {
    ($($(#[$doc:meta])* $name:ident($($arg:ident: $ty:ty),*) -> $ret:ty;)*) => {
        $(
            $(#[$doc])*
            pub fn $name($($arg: $ty),*) -> Result<$ret> {
                Engine::default().$name($($arg),*)
            }
        )*
    };
}

default_engine! {
    /// Accepts iff the positive product is safe and maps to no negative.
    qbe_test_cq(db: &Arc<Database>, ex: &ExampleSets) -> Verdict;
    definability_test_cq(db: &Arc<Database>, ex: &ExampleSets) -> Verdict;
    qbe_test_pebble(db: &Arc<Database>, ex: &ExampleSets, k: usize) -> Verdict;
    definability_test_pebble(db: &Arc<Database>, ex: &ExampleSets, k: usize) -> Verdict;
    /// Accepts iff no single positive maps to a negative. No safety clause.
    qbe_test_desync(db: &Arc<Database>, ex: &ExampleSets) -> Verdict;
    definability_test_desync(db: &Arc<Database>, ex: &ExampleSets) -> Verdict;
    qbe_test_desync_pebble(db: &Arc<Database>, ex: &ExampleSets, k: usize) -> Verdict;
    definability_test_desync_pebble(db: &Arc<Database>, ex: &ExampleSets, k: usize) -> Verdict;
    canonical_explanation(db: &Arc<Database>, ex: &ExampleSets, class: Class) -> CanonicalExplanation;
    canonical_definition(db: &Arc<Database>, ex: &ExampleSets, class: Class) -> CanonicalExplanation;
    evaluate_tw_explanation(db: &Arc<Database>, ex: &ExampleSets, k: usize) -> BTreeSet<Tuple>;
    evaluate_utw_explanation(db: &Arc<Database>, ex: &ExampleSets, k: usize) -> BTreeSet<Tuple>;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn facts(list: &[(&str, &[&str])]) -> Arc<Database> {
        Arc::new(Database::from_facts(list.iter().map(|(r, a)| (*r, a.iter().copied()))).unwrap())
    }

    fn examples(db: &Database, pos: &[&[&str]], neg: &[&[&str]]) -> ExampleSets {
        ExampleSets::new(
            db.domain_size(),
            pos.iter().map(|t| db.tuple(t).unwrap()),
            neg.iter().map(|t| db.tuple(t).unwrap()),
        )
        .unwrap()
    }

    fn example_one() -> Arc<Database> {
        facts(&[("R", &["a", "b"]), ("S", &["c", "d"])])
    }

    #[test]
    fn class_parsing() {
        assert_eq!("cq".parse::<Class>().unwrap(), Class::Cq);
        assert_eq!("tw:2".parse::<Class>().unwrap(), Class::Tw(2));
        assert_eq!("ctw:1".parse::<Class>().unwrap(), Class::Ctw(1));
        assert!("tw:0".parse::<Class>().is_err());
        assert!("tw".parse::<Class>().is_err());
        assert_eq!(Class::Utw(3).to_string(), "utw:3");
        assert_eq!(Class::Tw(1).game_parameter().unwrap(), Some(2));
    }

    #[test]
    fn unsafe_product_rejects() {
        let db = example_one();
        let ex = examples(&db, &[&["a", "b"], &["c", "d"]], &[&["a", "a"]]);
        let v = qbe_test_cq(&db, &ex).unwrap();
        assert_eq!(v, Verdict::reject(Witness::UnsafeProduct));
        assert_eq!(qbe_test_pebble(&db, &ex, 2).unwrap(), v);
        assert_eq!(definability_test_cq(&db, &ex).unwrap(), v);
    }

    #[test]
    fn desync_has_no_safety_clause() {
        let db = example_one();
        let ex = examples(&db, &[&["a", "b"], &["c", "d"]], &[]);
        assert!(qbe_test_desync(&db, &ex).unwrap().accepted);
    }

    #[test]
    fn safe_product_without_negatives_accepts() {
        let db = facts(&[("E", &["a", "b"]), ("E", &["b", "c"])]);
        let ex = examples(&db, &[&["a"], &["b"]], &[]);
        assert!(qbe_test_cq(&db, &ex).unwrap().accepted);
    }

    #[test]
    fn shared_positive_and_negative_rejects() {
        let db = facts(&[("E", &["a", "b"]), ("E", &["b", "c"])]);
        let ex = examples(&db, &[&["a"], &["b"]], &[&["b"]]);
        let v = qbe_test_cq(&db, &ex).unwrap();
        match v.witness {
            Some(Witness::FailingNegative { tuple, assignment }) => {
                assert_eq!(tuple, db.tuple(&["b"]).unwrap());
                assert!(assignment.is_some());
            }
            other => panic!("unexpected witness {other:?}"),
        }
        let v = qbe_test_desync(&db, &ex).unwrap();
        assert_eq!(v.witness.as_ref().map(Witness::kind), Some("failing-pair"));
    }

    #[test]
    fn definability_single_edge() {
        // (D,(a)) -> (D,(b)) needs an edge leaving b; there is none
        let db = facts(&[("E", &["a", "b"])]);
        let ex = ExampleSets::positive_only(2, [db.tuple(&["a"]).unwrap()]).unwrap();
        assert!(definability_test_cq(&db, &ex).unwrap().accepted);
        // {a, b} needs a free variable that is both a source and a target
        let all = ExampleSets::positive_only(2, all_tuples(2, 1)).unwrap();
        assert_eq!(definability_test_cq(&db, &all).unwrap(), Verdict::reject(Witness::UnsafeProduct));
    }

    #[test]
    fn definability_matches_qbe_with_complement() {
        let db = facts(&[("E", &["a", "b"]), ("E", &["b", "c"]), ("E", &["c", "c"])]);
        let pos = ExampleSets::positive_only(3, [db.tuple(&["a"]).unwrap()]).unwrap();
        let with_neg = ExampleSets::new(3, pos.positive().iter().cloned(), outside(3, &pos)).unwrap();
        assert_eq!(
            definability_test_cq(&db, &pos).unwrap(),
            qbe_test_cq(&db, &with_neg).unwrap()
        );
        assert_eq!(
            definability_test_desync(&db, &pos).unwrap(),
            qbe_test_desync(&db, &with_neg).unwrap()
        );
    }

    #[test]
    fn canonical_explanations_verify() {
        let db = facts(&[("E", &["a", "b"]), ("E", &["b", "c"]), ("E", &["c", "d"])]);
        let ex = examples(&db, &[&["a"], &["b"]], &[&["d"]]);
        let cq = canonical_explanation(&db, &ex, Class::Cq).unwrap();
        let result = cq.evaluate(&db).unwrap();
        assert!(ex.positive().is_subset(&result));
        assert!(result.is_disjoint(ex.negative()));
        let ucq = canonical_explanation(&db, &ex, Class::Ucq).unwrap();
        let result = ucq.evaluate(&db).unwrap();
        assert!(ex.positive().is_subset(&result));
        assert!(result.is_disjoint(ex.negative()));

        let single = examples(&db, &[&["b"]], &[]);
        match canonical_explanation(&db, &single, Class::Cq).unwrap() {
            CanonicalExplanation::Cq(q) => {
                assert!(Arc::ptr_eq(&q.db, &db));
                assert_eq!(q.point, db.tuple(&["b"]).unwrap());
            }
            other => panic!("unexpected {other:?}"),
        }

        let rejected = examples(&db, &[&["a"]], &[&["a"]]);
        assert!(canonical_explanation(&db, &rejected, Class::Cq).is_err());
    }

    #[test]
    fn tw_evaluation_contract() {
        let db = facts(&[("E", &["a", "b"]), ("E", &["b", "c"]), ("E", &["c", "d"])]);
        let ex = examples(&db, &[&["a"], &["b"]], &[&["d"]]);
        let result = evaluate_tw_explanation(&db, &ex, 1).unwrap();
        assert!(ex.positive().is_subset(&result));
        assert!(result.is_disjoint(ex.negative()));
        assert!(evaluate_tw_explanation(&db, &ex, 0).is_err());

        let rejected = examples(&db, &[&["a"]], &[&["a"]]);
        assert!(matches!(
            evaluate_tw_explanation(&db, &rejected, 1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn pebble_test_needs_two_pebbles() {
        let db = example_one();
        let ex = examples(&db, &[&["a", "b"]], &[]);
        assert_eq!(qbe_test_pebble(&db, &ex, 1).unwrap_err(), Error::PebbleCount(1));
    }

    #[test]
    fn deadline_in_the_past_times_out() {
        let db = facts(&[("E", &["a", "b"]), ("E", &["b", "c"])]);
        let ex = examples(&db, &[&["a"]], &[&["b"]]);
        let engine = Engine::new(Limits {
            deadline: Some(std::time::Instant::now()),
            ..Limits::default()
        });
        assert_eq!(engine.qbe_test_cq(&db, &ex).unwrap_err(), Error::Timeout);
    }
}
