//! Random small instances for the property suites.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use qbe_core::{Database, ElemId, ExampleSets, GraphDatabase, Nfa, PointedDatabase, Tuple};

/// A database over elements `e0..`, with a binary relation `E` and
/// sometimes a unary relation `U`. Every element occurs in some atom, so
/// the domain has exactly the drawn size.
pub fn database<R: Rng>(rng: &mut R, max_domain: usize, max_atoms: usize) -> Arc<Database> {
    let domain = rng.gen_range(1..=max_domain);
    let atoms = rng.gen_range(domain.min(max_atoms)..=max_atoms.max(1));
    let unary = rng.gen_bool(0.3);
    let name = |i: usize| format!("e{i}");
    let mut facts: Vec<(&str, Vec<String>)> = Vec::new();
    for i in 0..atoms.max(domain) {
        // the first atoms cover the domain; the rest are free
        let anchor = if i < domain { i } else { rng.gen_range(0..domain) };
        let fact = if unary && rng.gen_bool(0.3) {
            ("U", vec![name(anchor)])
        } else {
            let other = name(rng.gen_range(0..domain));
            if rng.gen_bool(0.5) {
                ("E", vec![name(anchor), other])
            } else {
                ("E", vec![other, name(anchor)])
            }
        };
        facts.push(fact);
    }
    Arc::new(Database::from_facts(facts).unwrap())
}

pub fn tuple<R: Rng>(rng: &mut R, domain: usize, arity: usize) -> Tuple {
    Tuple((0..arity).map(|_| ElemId(rng.gen_range(0..domain) as u32)).collect())
}

/// Examples of arity at most `max_arity`; negatives may overlap positives.
pub fn examples<R: Rng>(
    rng: &mut R,
    domain: usize,
    max_arity: usize,
    max_pos: usize,
    max_neg: usize,
) -> ExampleSets {
    let arity = rng.gen_range(1..=max_arity);
    let pos: Vec<Tuple> = (0..rng.gen_range(1..=max_pos)).map(|_| tuple(rng, domain, arity)).collect();
    let neg: Vec<Tuple> = (0..rng.gen_range(0..=max_neg)).map(|_| tuple(rng, domain, arity)).collect();
    ExampleSets::new(domain, pos, neg).unwrap()
}

/// A random pointed database of the given arity.
pub fn pointed<R: Rng>(rng: &mut R, max_domain: usize, max_atoms: usize, arity: usize) -> PointedDatabase {
    let db = database(rng, max_domain, max_atoms);
    let point = tuple(rng, db.domain_size(), arity);
    PointedDatabase { db, point }
}

/// A graph on nodes `0..nodes` (isolated ones included) over `labels`,
/// each possible edge present with probability `density`.
pub fn graph<R: Rng>(rng: &mut R, nodes: usize, labels: &[&str], density: f64) -> Arc<GraphDatabase> {
    let mut edges = Vec::new();
    for u in 0..nodes {
        for v in 0..nodes {
            for &l in labels {
                if rng.gen_bool(density) {
                    edges.push((u.to_string().as_str().into(), l, v.to_string().as_str().into()));
                }
            }
        }
    }
    let names = (0..nodes).map(|i| i.to_string().as_str().into());
    Arc::new(GraphDatabase::new(names, labels.iter().copied(), edges).unwrap())
}

/// An automaton over `labels` with random transitions and start/final
/// states.
pub fn nfa<R: Rng>(rng: &mut R, states: usize, labels: &[&str], density: f64) -> Nfa {
    let mut transitions = Vec::new();
    for p in 0..states as u32 {
        for q in 0..states as u32 {
            for &l in labels {
                if rng.gen_bool(density) {
                    transitions.push((p, l, q));
                }
            }
        }
    }
    let all: Vec<u32> = (0..states as u32).collect();
    let count = rng.gen_range(1..=states);
    let start: Vec<u32> = all.choose_multiple(rng, count).copied().collect();
    let finals: Vec<u32> = all.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
    Nfa::new(states, labels.iter().copied(), transitions, start, finals).unwrap()
}
