use alloc::string::String;

/// Errors raised by the core crate.
///
/// Variants map onto the CLI exit-code contract: domain errors, budget
/// refusals and incomplete factorizations are kept apart so callers can
/// tell "bad input" from "input too large for the configured effort".
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("window of size {size} exceeds the budget of {limit}")]
    Budget { size: u128, limit: u128 },

    #[error("incomplete factorization: cofactor {cofactor} could not be split or certified prime")]
    IncompleteFactorization { cofactor: String },

    #[error("lifting error: {0}")]
    Lifting(String),

    #[error("no witness: {0}")]
    NoWitness(String),

    #[error("empty: {0}")]
    Empty(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
