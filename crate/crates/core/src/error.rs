use thiserror::Error;

/// Errors produced by the library.
///
/// Validation failures name the standing hypothesis that was violated so the
/// CLI can pass the message through unchanged.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix must have at least one row and one column")]
    EmptyMatrix,

    #[error(
        "matrix has a negative entry at ({row}, {col}); transition matrices must be nonnegative"
    )]
    NegativeEntry { row: usize, col: usize },

    #[error("matrix is not irreducible (its support digraph is not strongly connected)")]
    Reducible,

    #[error("matrix is a permutation matrix; the shift is finite and excluded")]
    PermutationMatrix,

    #[error("matrix is not a 0-1 matrix")]
    NotZeroOne,

    #[error("vertex {vertex} is out of range for a {size}-vertex graph")]
    BadVertex { vertex: usize, size: usize },

    #[error("C·D does not reproduce the given matrix")]
    FactorizationMismatch,

    #[error("matrix is not an expansion at vertex {0}")]
    NotAnExpansion(usize),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("group is infinite (free rank {free_rank}); only finite groups have enumerable automorphisms")]
    InfiniteGroup { free_rank: usize },

    #[error("word operators live over different alphabets")]
    AmbientMismatch,

    #[error("word {0:?} is not admissible")]
    InadmissibleWord(Vec<usize>),

    #[error("invalid projection: {0}")]
    BadProjection(String),

    #[error("no admissible choice: {0}")]
    NoAdmissibleChoice(String),

    #[error("search exhausted: {0}")]
    SearchExhausted(String),

    #[error("move chain failed at step {index}: {source}")]
    StepFailed {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid group element: {0}")]
    BadElement(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by hitting a configured budget rather than by
    /// bad input.
    pub fn is_resource_limit(&self) -> bool {
        match self {
            Error::ResourceLimit(_) | Error::SearchExhausted(_) => true,
            Error::StepFailed { source, .. } => source.is_resource_limit(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
