use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("relation `{relation}` used with arity {found}, expected {expected}")]
    ArityConflict {
        relation: String,
        expected: usize,
        found: usize,
    },
    #[error("relation `{0}` must have arity at least 1")]
    ZeroArity(String),
    #[error("operands are over different schemas")]
    SchemaMismatch,
    #[error("graphs are over different alphabets")]
    AlphabetMismatch,
    #[error("tuple of arity {found} where arity {expected} was expected")]
    TupleArity { expected: usize, found: usize },
    #[error("product of an empty sequence of factors")]
    EmptyProduct,
    #[error("the set of positive examples is empty")]
    EmptyPositive,
    #[error("example tuples must have arity at least 1")]
    ZeroArityExamples,
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("element id {0} is outside the domain")]
    ElementOutOfRange(u32),
    #[error("coordinate {coordinate} out of range for an element of width {width}")]
    Coordinate { coordinate: usize, width: usize },
    #[error("pebble games need at least 2 pebbles, got {0}")]
    PebbleCount(usize),
    #[error("treewidth parameter must be at least 1, got {0}")]
    Treewidth(usize),
    #[error("product has {nodes} nodes, over the budget of {budget}")]
    Budget { nodes: u128, budget: usize },
    #[error("time budget exhausted")]
    Timeout,
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
}
