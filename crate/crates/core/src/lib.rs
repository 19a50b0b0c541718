//! Decision procedures for query-by-example and definability.
//!
//! Given a database and positive/negative example tuples, the tests in
//! [`qbe`] decide whether some conjunctive query (or union of conjunctive
//! queries, optionally of bounded treewidth) separates the examples. The
//! tests in [`crpq`] do the same for conjunctive regular path queries over
//! graph databases.

pub mod crpq;
pub mod error;
pub mod graph;
pub mod hom;
mod limits;
pub mod model;
pub mod pebble;
pub mod qbe;

pub use error::{Error, Result};
pub use hom::{check_hom, check_partial_hom, evaluate_cq, find_hom};
pub use crpq::{strong_hom, strong_pebble_game, StrongAssignment};
pub use graph::{contains, graph_product, pair_language, ContainmentCache, GraphDatabase, Nfa, PointedGraph};
pub use limits::{Limits, DEFAULT_NODE_BUDGET};
pub use model::{
    product, projection, Assignment, Atom, Database, ElemId, Element, ExampleSets,
    PointedDatabase, Product, RelId, Schema, Tuple,
};
pub use pebble::{pebble_closure, pebble_game, PartialMap};
pub use qbe::{CanonicalExplanation, Class, Engine, Verdict, Witness};
