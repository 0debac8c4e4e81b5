//! Quantum information in base `n` via state partitions.
//!
//! A system of `k` particles with `n` measurement outcomes each has `n^k`
//! product states. A *nit set* is a family of `k` balanced partitions of
//! those states such that picking one block per partition always pins down
//! exactly one state; each partition is the outcome structure of one
//! `n`-ary observable, and the family as a whole shows that `k` particles
//! can carry `k` nits of information.
//!
//! The crate covers:
//!
//! * [`partitions`] — construction, validation, canonicalization and
//!   relabeling of nit sets;
//! * [`enumerate`] — exhaustive orbit enumeration of all nit sets at a
//!   given `(n, k)`, a brute-force oracle, and mapping-permutation search;
//! * [`operators`] — integer diagonal nit operators, prime-product context
//!   operators, and eigenvalue decoding by prime factorization;
//! * [`spectra`] — block eigenstates and their Schmidt-rank entanglement
//!   classification;
//! * [`inverse`] — conjugation of the diagonal operators into an arbitrary
//!   orthonormal target basis (with the built-in W-basis worked example);
//! * [`urn`] — the quasi-classical generalized urn analogue with colored
//!   lenses.

pub mod enumerate;
pub mod error;
pub mod inverse;
pub mod operators;
pub mod partitions;
pub mod perm;
pub mod spectra;
pub mod urn;

pub use error::{Error, Result};
pub use partitions::{NitParams, NitSet, Partition, StateIndex, ValidityReport};
pub use perm::Permutation;

/// Complex scalar used throughout [`spectra`] and [`inverse`],
/// re-exported so callers need not depend on `num-complex` directly.
pub use num_complex::Complex64;
