//! Searches for a graph over the single label `a` made of two 4-cliques
//! {1,2,3,4}, {1',2',3',4'} and a 3-clique {1'',2'',3''} (cliques of the
//! underlying undirected graph) where S+ = {1, 1'} and S- = {1''} have a UCQ
//! explanation but no CRPQ explanation. Edges 1->4 and 4'->1' are fixed.
//!
//! Each clique edge is forward, backward or both; the 4-cliques range over
//! tournaments and the 3-clique over all three choices per edge. Prints the
//! first hit in enumeration order, in the `u label v` format.

use std::sync::Arc;
use std::time::Instant;

use qbe_core::{Engine, ExampleSets, GraphDatabase};

/// Digit `i` of `code` in base `base` orients the `i`-th pair of `nodes` in
/// lexicographic order: 0 forward, 1 backward, 2 both ways.
pub fn clique(nodes: &[&str], code: u32, base: u32) -> Vec<(String, String, String)> {
    let mut edges = Vec::new();
    let mut rest = code;
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            let digit = rest % base;
            rest /= base;
            let edge = |u: &str, v: &str| (u.to_owned(), "a".to_owned(), v.to_owned());
            if digit != 1 {
                edges.push(edge(nodes[i], nodes[j]));
            }
            if digit != 0 {
                edges.push(edge(nodes[j], nodes[i]));
            }
        }
    }
    edges
}

pub fn candidate(m1: u32, m2: u32, m3: u32) -> GraphDatabase {
    let mut edges = clique(&["1", "2", "3", "4"], m1, 2);
    edges.extend(clique(&["1'", "2'", "3'", "4'"], m2, 2));
    edges.extend(clique(&["1''", "2''", "3''"], m3, 3));
    GraphDatabase::from_edges(edges)
}

/// (desynchronized relational QBE, CRPQ QBE) on S+ = {1, 1'}, S- = {1''}.
pub fn verdicts(engine: &Engine, g: &Arc<GraphDatabase>) -> (bool, bool) {
    let ex = ExampleSets::new(
        g.node_count(),
        [g.tuple(&["1"]).unwrap(), g.tuple(&["1'"]).unwrap()],
        [g.tuple(&["1''"]).unwrap()],
    )
    .unwrap();
    let crpq = engine.qbe_test_crpq(g, &ex).unwrap().accepted;
    let db = Arc::new(g.to_database());
    let rel = |name: &str| db.tuple(&[name]).unwrap();
    let rex = ExampleSets::new(db.domain_size(), [rel("1"), rel("1'")], [rel("1''")]).unwrap();
    let ucq = engine.qbe_test_desync(&db, &rex).unwrap().accepted;
    (ucq, crpq)
}

/// The first hit and the number of candidates tried.
pub fn search(engine: &Engine) -> (Option<GraphDatabase>, usize) {
    let mut tried = 0;
    // pair (0,3) is digit 2 of a 4-clique
    for m3 in 0..27u32 {
        for m1 in (0..64u32).filter(|m| m >> 2 & 1 == 0) {
            for m2 in (0..64u32).filter(|m| m >> 2 & 1 == 1) {
                tried += 1;
                let g = Arc::new(candidate(m1, m2, m3));
                if verdicts(engine, &g) == (true, false) {
                    return (Some(Arc::unwrap_or_clone(g)), tried);
                }
            }
        }
    }
    (None, tried)
}

#[allow(dead_code)]
fn main() {
    let start = Instant::now();
    let (found, tried) = search(&Engine::default());
    match found {
        Some(g) => {
            eprintln!("found after {tried} candidates in {:.2?}", start.elapsed());
            print!("{g}");
        }
        None => {
            eprintln!("nothing in {tried} candidates ({:.2?})", start.elapsed());
            std::process::exit(1);
        }
    }
}
