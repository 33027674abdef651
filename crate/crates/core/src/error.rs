use alloc::string::String;

/// Errors produced by graph construction, the solvers and the generators.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("vertex index {index} out of range for graph with {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("edge ({i}, {j}) has non-positive or non-finite weight {weight}")]
    InvalidWeight { i: usize, j: usize, weight: f64 },

    #[error("self-loop on vertex {0} (enable self-loops on the builder to allow it)")]
    SelfLoop(usize),

    #[error("vertex {0} is isolated (degree 0)")]
    IsolatedVertex(usize),

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dense materialization of {n}x{n} exceeds cap {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{k} clusters do not divide {n} vertices evenly")]
    NotDivisible { n: usize, k: usize },

    #[error("no sample without isolated vertices after {0} attempts")]
    RetriesExhausted(usize),

    #[error("vertex {0} has no intra-cluster edges")]
    NoIntraEdges(usize),
}

pub type Result<T> = core::result::Result<T, Error>;
