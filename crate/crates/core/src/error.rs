use thiserror::Error;

/// Errors raised while reading or validating diagram input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("malformed code: {0}")]
    MalformedCode(String),
    #[error("edge label {label} appears {count} times (expected 2)")]
    NonQuadrivalent { label: u32, count: usize },
    #[error("rotation system is not a sphere embedding (V - E + F = {euler}, expected {expected})")]
    NonPlanar { euler: i64, expected: i64 },
    #[error("signed Gauss code has no planar realization")]
    NonRealizable,
    #[error("diagram has {0} vertices, more than the supported 128")]
    TooLarge(usize),
    #[error("operation requires a connected diagram")]
    Disconnected,
}

/// Errors from the Conway decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompositionError {
    #[error("region {region} is neither a twisted band diagram nor a jewel")]
    NotAdmissible { region: usize },
    #[error("circles cross and admit no disjoint realization")]
    NotComparable,
    #[error("tangle is not rational: {0}")]
    NotRational(String),
    #[error("no admissible family exists among the Haseman circles")]
    NotDecomposable,
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// Errors from rational tangle arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FractionError {
    #[error("continued fraction collapses (zero denominator at term {0})")]
    DivisionCollapse(usize),
    #[error("invalid continued fraction: {0}")]
    InvalidTerms(String),
    #[error("cannot parse fraction: {0}")]
    Parse(String),
    #[error("integer overflow in continued fraction evaluation")]
    Overflow,
}

/// Errors from flype moves.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlypeError {
    #[error("illegal flype: {0}")]
    IllegalMove(String),
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
}

/// Errors from the periodicity pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PeriodicityError {
    #[error("diagram has {0} components; periodicity analysis requires a knot")]
    NotAKnot(usize),
    #[error("diagram is not alternating")]
    NotAlternating,
    #[error("diagram must be prime and reduced")]
    NotPrimeReduced,
    #[error("period must be at least 2, got {0}")]
    InvalidPeriod(u32),
    #[error("atom adjacency graph is not a tree")]
    NotATree,
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
    #[error(transparent)]
    Flype(#[from] FlypeError),
}
