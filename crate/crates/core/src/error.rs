use thiserror::Error;

/// Errors raised by graph construction, weighting arithmetic, enumeration
/// and the factorization/relation searches.
#[derive(Error, Debug)]
pub enum Error {
    /// The graph violates a structural invariant (trivalence, dense ids, ...).
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    /// No graph exists for the requested builder parameters.
    #[error("no trivalent graph for (g, n) = ({g}, {n})")]
    NoSuchGraph { g: usize, n: usize },

    /// An edge id was used where a leaf (or a bridge) was required.
    #[error("edge {edge}: {reason}")]
    BadEdge { edge: usize, reason: &'static str },

    /// A weighting does not fit the graph it was paired with.
    #[error("structural mismatch: {0}")]
    Structural(String),

    /// A weighting that should be a lattice point is not.
    #[error("not a member: {0}")]
    NotMember(String),

    /// An integer sum left the representable range.
    #[error("integer overflow in weighting arithmetic")]
    Overflow,

    /// A search or enumeration hit its node budget. Never a silent truncation.
    #[error("search budget of {budget} nodes exhausted")]
    BudgetExhausted { budget: u64 },

    /// A constructive step produced something the corresponding lemma rules out.
    #[error("constructive step failed: {0}")]
    Invariant(String),

    /// The constructive factorizer does not recognise this graph shape.
    #[error("unsupported graph shape for constructive factorization: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
