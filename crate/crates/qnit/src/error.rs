//! Crate-wide error type.

use crate::partitions::ValidityReport;

/// Errors produced by any operation in this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Rejected input parameters (out-of-range `n`/`k`, wrong lengths, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An exhaustive sweep would exceed the permitted work budget.
    ///
    /// `required` is `None` when the required count does not even fit in
    /// 128 bits.
    #[error("budget exceeded for {what}: required {} candidates, budget {budget}",
            required.map(|r| r.to_string()).unwrap_or_else(|| "more than 2^128".into()))]
    BudgetExceeded {
        /// What was being enumerated.
        what: String,
        /// Number of candidates the sweep would have to visit.
        required: Option<u128>,
        /// The budget that was in force.
        budget: u64,
    },

    /// Malformed cycle-notation text.
    #[error("cycle notation error: {0}")]
    CycleNotation(String),

    /// A nit set failed validation where a valid one is required.
    #[error("invalid nit set:\n{0}")]
    InvalidNitSet(ValidityReport),

    /// Prime assignment rejected (wrong counts, repeats, non-primes).
    #[error("prime assignment error: {0}")]
    PrimeAssignment(String),

    /// Context composition rejected (shared primes across operators).
    #[error("composition error: {0}")]
    Composition(String),

    /// Integer overflow while forming operator products.
    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    /// A context eigenvalue could not be decoded to an outcome tuple.
    #[error("decode error: {0}")]
    Decode(String),

    /// Operation requested outside its supported domain.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Vector/matrix dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A matrix expected to be unitary is not, within tolerance.
    #[error(
        "matrix is not unitary: max deviation of U*U^dagger from identity is {max_deviation:e}"
    )]
    NotUnitary {
        /// Largest entrywise deviation of `U * U^dagger` from the identity.
        max_deviation: f64,
    },

    /// A matrix expected to be Hermitian is not, within tolerance.
    #[error("matrix is not Hermitian: max deviation {max_deviation:e}")]
    NotHermitian {
        /// Largest entrywise deviation of `M` from `M^dagger`.
        max_deviation: f64,
    },

    /// Malformed JSON input.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
