//! Brute-force reference implementations for cross-checking `qbe-core`.
//!
//! Nothing here shares search code with the crate it checks: homomorphisms
//! are enumerated exhaustively, pebble games are solved on the explicit
//! configuration graph, containment is decided by a joint subset
//! construction of both automata or refuted by enumerating words, and
//! candidate queries are evaluated by trying every variable assignment.

mod cq;
mod game;
pub mod gen;
mod hom;
mod treewidth;
mod words;

pub use cq::{enumerate_tw_explanations, enumerate_utw_explanations, CqCandidate};
pub use game::{game_tree_pebble, game_tree_strong, strong_hom_exists, Convention};
pub use hom::all_homs;
pub use treewidth::{treewidth, TreeDecomposition, UGraph};
pub use words::{language_contained, word_containment};
