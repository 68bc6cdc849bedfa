use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A content was requested in a context that does not measure it.
    #[error("CONTENT_NOT_IN_CONTEXT: content `{content}` is not measured in context `{context}`")]
    ContentNotInContext { content: String, context: String },

    /// A context id that does not exist in the system.
    #[error("UNKNOWN_CONTEXT: no context with id `{0}`")]
    UnknownContext(String),

    /// An input outside its admissible range.
    #[error("DOMAIN: {0}")]
    Domain(String),

    /// Mismatched generator dimensions (pmf count, pmf length, rank vs order).
    #[error("SHAPE: {0}")]
    Shape(String),

    /// Outcome space exceeds the slot cap; carries the cap needed to proceed.
    #[error("TOO_LARGE: system needs {slots} slots but the cap is {cap}; raise the cap to at least {slots}")]
    TooLarge { slots: usize, cap: usize },

    /// Exact solver nonzero cap exceeded.
    #[error("CAP_EXCEEDED: linear program has {nonzeros} nonzeros, exact-solver cap is {cap}")]
    CapExceeded { nonzeros: usize, cap: usize },

    /// Operation defined only for cyclic (order-2) systems.
    #[error("NOT_CYCLIC: {0}")]
    NotCyclic(String),

    /// The solver returned an unusable result (bad status or residuals above tolerance).
    #[error("SOLVER_FAILURE: {0}")]
    SolverFailure(String),

    /// A system failed validation where a valid one is required.
    #[error("INVALID_SYSTEM: {0}")]
    InvalidSystem(String),

    /// A malformed linear program was handed to a solver.
    #[error("INVALID_PROGRAM: {0}")]
    InvalidProgram(String),

    #[error("IO: {0}")]
    Io(#[from] std::io::Error),

    #[error("PARSE: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
