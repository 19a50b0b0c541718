use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use qbe_core::qbe::*;
use qbe_core::{evaluate_cq, product, Database, ExampleSets, PointedDatabase, Tuple};
use qbe_oracle::{enumerate_tw_explanations, enumerate_utw_explanations, gen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64) -> (Arc<Database>, ExampleSets) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let db = gen::database(&mut rng, 4, 6);
    let ex = gen::examples(&mut rng, db.domain_size(), 2, 2, 3);
    (db, ex)
}

fn factors(db: &Arc<Database>, ex: &ExampleSets) -> Vec<PointedDatabase> {
    ex.positive()
        .iter()
        .map(|a| PointedDatabase { db: db.clone(), point: a.clone() })
        .collect()
}

fn all_tuples(domain: usize, arity: usize) -> BTreeSet<Tuple> {
    let mut out = vec![Tuple(vec![])];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..domain as u32).map(move |e| {
                    let mut t = t.clone();
                    t.0.push(qbe_core::ElemId(e));
                    t
                })
            })
            .collect();
    }
    out.into_iter().collect()
}

/// The answers of the canonical CQ, or `None` when the product is unsafe.
fn canonical_cq_answers(db: &Arc<Database>, ex: &ExampleSets) -> Option<BTreeSet<Tuple>> {
    let p = product(&factors(db, ex)).unwrap().pointed()?;
    Some(evaluate_cq(&p, db).unwrap())
}

fn canonical_ucq_answers(db: &Arc<Database>, ex: &ExampleSets) -> BTreeSet<Tuple> {
    factors(db, ex).iter().flat_map(|f| evaluate_cq(f, db).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn cq_test_matches_canonical_query(seed in any::<u64>()) {
        let (db, ex) = instance(seed);
        let explains = canonical_cq_answers(&db, &ex)
            .is_some_and(|got| ex.positive().is_subset(&got) && got.is_disjoint(ex.negative()));
        prop_assert_eq!(qbe_test_cq(&db, &ex).unwrap().accepted, explains);
        let defines = canonical_cq_answers(&db, &ex).is_some_and(|got| &got == ex.positive());
        prop_assert_eq!(definability_test_cq(&db, &ex).unwrap().accepted, defines);
    }

    #[test]
    fn ucq_test_matches_canonical_union(seed in any::<u64>()) {
        let (db, ex) = instance(seed);
        let got = canonical_ucq_answers(&db, &ex);
        prop_assert!(ex.positive().is_subset(&got));
        prop_assert_eq!(qbe_test_desync(&db, &ex).unwrap().accepted, got.is_disjoint(ex.negative()));
        prop_assert_eq!(definability_test_desync(&db, &ex).unwrap().accepted, &got == ex.positive());
    }

    #[test]
    fn relaxations_are_ordered(seed in any::<u64>()) {
        let (db, ex) = instance(seed);
        let cq = qbe_test_cq(&db, &ex).unwrap().accepted;
        let tw2 = qbe_test_pebble(&db, &ex, 3).unwrap().accepted;
        let tw1 = qbe_test_pebble(&db, &ex, 2).unwrap().accepted;
        let ucq = qbe_test_desync(&db, &ex).unwrap().accepted;
        let utw1 = qbe_test_desync_pebble(&db, &ex, 2).unwrap().accepted;
        // fewer pebbles means more negatives reached, so fewer acceptances
        prop_assert!(!tw1 || tw2);
        prop_assert!(!tw2 || cq);
        prop_assert!(!cq || ucq);
        prop_assert!(!utw1 || ucq);
        prop_assert!(!tw1 || utw1);
    }

    #[test]
    fn definability_is_qbe_against_the_complement(seed in any::<u64>()) {
        let (db, ex) = instance(seed);
        let rest: Vec<Tuple> = all_tuples(db.domain_size(), ex.arity())
            .into_iter()
            .filter(|t| !ex.positive().contains(t))
            .collect();
        let full = ExampleSets::new(db.domain_size(), ex.positive().iter().cloned(), rest).unwrap();
        prop_assert_eq!(definability_test_cq(&db, &ex).unwrap(), qbe_test_cq(&db, &full).unwrap());
        prop_assert_eq!(definability_test_pebble(&db, &ex, 2).unwrap(), qbe_test_pebble(&db, &full, 2).unwrap());
        prop_assert_eq!(definability_test_desync(&db, &ex).unwrap(), qbe_test_desync(&db, &full).unwrap());
        prop_assert_eq!(
            definability_test_desync_pebble(&db, &ex, 2).unwrap(),
            qbe_test_desync_pebble(&db, &full, 2).unwrap()
        );
    }

    #[test]
    fn evaluations_explain_accepted_instances(seed in any::<u64>()) {
        let (db, ex) = instance(seed);
        for k in [1, 2] {
            if qbe_test_pebble(&db, &ex, k + 1).unwrap().accepted {
                let e = evaluate_tw_explanation(&db, &ex, k).unwrap();
                prop_assert!(ex.positive().is_subset(&e));
                prop_assert!(e.is_disjoint(ex.negative()));
            }
            if qbe_test_desync_pebble(&db, &ex, k + 1).unwrap().accepted {
                let e = evaluate_utw_explanation(&db, &ex, k).unwrap();
                prop_assert!(ex.positive().is_subset(&e));
                prop_assert!(e.is_disjoint(ex.negative()));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn bounded_explanations_pass_the_pebble_tests(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let db = gen::database(&mut rng, 3, 5);
        let ex = gen::examples(&mut rng, db.domain_size(), 1, 2, 2);
        if enumerate_tw_explanations(&db, &ex, 1, 3, 4).unwrap().is_some() {
            prop_assert!(qbe_test_pebble(&db, &ex, 2).unwrap().accepted);
        }
        if enumerate_utw_explanations(&db, &ex, 1, 3, 4).unwrap().is_some() {
            prop_assert!(qbe_test_desync_pebble(&db, &ex, 2).unwrap().accepted);
        }
    }
}

#[test]
fn witnesses_come_first_in_order() {
    let db = Arc::new(Database::from_facts([("E", ["a", "b"]), ("E", ["b", "c"]), ("E", ["c", "c"])]).unwrap());
    // c reaches itself forever, so a and b both fail against c; a is first
    let pos = [db.tuple(&["c"]).unwrap()];
    let neg = [db.tuple(&["a"]).unwrap(), db.tuple(&["b"]).unwrap(), db.tuple(&["c"]).unwrap()];
    let ex = ExampleSets::new(db.domain_size(), pos, neg).unwrap();
    let v = qbe_test_cq(&db, &ex).unwrap();
    match v.witness {
        Some(Witness::FailingNegative { tuple, .. }) => assert_eq!(tuple, db.tuple(&["c"]).unwrap()),
        other => panic!("unexpected {other:?}"),
    }
    let ex = ExampleSets::new(db.domain_size(), [db.tuple(&["b"]).unwrap()], [db.tuple(&["a"]).unwrap(), db.tuple(&["c"]).unwrap()]).unwrap();
    // b -> c -> c: (D,b) maps to (D,c) but not to (D,a)
    let v = qbe_test_desync(&db, &ex).unwrap();
    match v.witness {
        Some(Witness::FailingPair { positive, negative, assignment }) => {
            assert_eq!(positive, db.tuple(&["b"]).unwrap());
            assert_eq!(negative, db.tuple(&["c"]).unwrap());
            assert!(assignment.is_some());
        }
        other => panic!("unexpected {other:?}"),
    }
}
