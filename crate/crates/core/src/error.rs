use thiserror::Error;

/// Errors raised by the simulator, the coding machinery and the cost model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Operands disagree in length, modulus or register layout.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Rank arguments need Z_A to be a field.
    #[error("unsupported modulus {0}: a prime modulus is required")]
    UnsupportedModulus(u32),

    #[error("infeasible request: {0}")]
    Infeasible(String),

    /// A register is missing or has the wrong shape for the transform.
    #[error("register layout error: {0}")]
    Layout(String),

    /// The request exceeds the simulator caps.
    #[error("resource cap exceeded: {0}")]
    Resource(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("search failed: {0}")]
    SearchFailure(String),

    #[error("missing or invalid parameter: {0}")]
    Parameter(String),

    /// A state or distribution broke one of its invariants (e.g. normalization).
    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
