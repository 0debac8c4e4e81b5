//! Integer diagonal observables over nit sets.
//!
//! A partition with `n` blocks becomes an observable by assigning one
//! prime to each block: the operator is the diagonal matrix whose entry
//! for state `s` is the prime of the block containing `s`. Multiplying
//! the `k` operators of a nit set entrywise yields the *context*
//! diagonal; when the primes are pairwise disjoint across operators, its
//! `n^k` entries are distinct and unique factorization recovers the full
//! outcome tuple — and hence the state — from a single eigenvalue.
//!
//! All arithmetic in this module is exact and integral; overflow is
//! detected, never wrapped.

use std::collections::HashSet;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::partitions::{NitParams, NitSet, Partition, StateIndex};

/// Deterministic primality test for `u64` (Miller–Rabin with a witness
/// set known to be exact over the full 64-bit range).
pub fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if x == p {
            return true;
        }
        if x.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = x - 1;
    let mut r = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut y = pow_mod(a, d, x);
        if y == 1 || y == x - 1 {
            continue;
        }
        for _ in 1..r {
            y = mul_mod(y, y, x);
            if y == x - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// The first `count` primes in increasing order.
pub fn first_primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut candidate = 2u64;
    while out.len() < count {
        if is_prime(candidate) {
            out.push(candidate);
        }
        candidate += if candidate == 2 { 1 } else { 2 };
    }
    out
}

/// One row of primes per partition, globally distinct, used to label
/// blocks with eigenvalues and to decode context eigenvalues again.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<u64>>", into = "Vec<Vec<u64>>")]
pub struct PrimeAssignment {
    rows: Vec<Vec<u64>>,
}

impl PrimeAssignment {
    /// Validates that every row has the same length (at least 2), every
    /// entry is prime, and no prime repeats anywhere in the assignment.
    pub fn new(rows: Vec<Vec<u64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::PrimeAssignment("no rows given".into()));
        }
        let width = rows[0].len();
        if width < 2 {
            return Err(Error::PrimeAssignment(
                "each row needs at least 2 primes (one per outcome)".into(),
            ));
        }
        let mut seen = HashSet::new();
        for (j, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::PrimeAssignment(format!(
                    "row {} has {} entries, expected {width}",
                    j + 1,
                    row.len()
                )));
            }
            for &q in row {
                if !is_prime(q) {
                    return Err(Error::PrimeAssignment(format!(
                        "{q} (row {}) is not prime",
                        j + 1
                    )));
                }
                if !seen.insert(q) {
                    return Err(Error::PrimeAssignment(format!(
                        "prime {q} appears more than once"
                    )));
                }
            }
        }
        Ok(PrimeAssignment { rows })
    }

    /// The default assignment for a shape: the first `k·n` primes in
    /// natural order, one row of `n` per partition. For two-outcome,
    /// three-particle systems this is `(2,3), (5,7), (11,13)`.
    pub fn default_for(params: NitParams) -> PrimeAssignment {
        let n = params.n() as usize;
        let k = params.k() as usize;
        let primes = first_primes(n * k);
        PrimeAssignment {
            rows: primes.chunks(n).map(|c| c.to_vec()).collect(),
        }
    }

    /// Rows of the assignment, one per partition.
    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    /// Number of rows (partitions covered).
    pub fn partition_count(&self) -> usize {
        self.rows.len()
    }

    /// Primes per row (outcomes per partition).
    pub fn outcome_count(&self) -> usize {
        self.rows[0].len()
    }
}

impl TryFrom<Vec<Vec<u64>>> for PrimeAssignment {
    type Error = Error;
    fn try_from(rows: Vec<Vec<u64>>) -> Result<Self> {
        PrimeAssignment::new(rows)
    }
}

impl From<PrimeAssignment> for Vec<Vec<u64>> {
    fn from(a: PrimeAssignment) -> Self {
        a.rows
    }
}

/// A diagonal observable induced by one partition: entry `i` is the
/// value assigned to the block containing state `i`. The inducing
/// partition and per-block values are kept alongside the entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagonalOperator {
    /// Diagonal entries, indexed by state (entry 0 ↔ state 1).
    pub entries: Vec<u64>,
    /// The partition this operator measures.
    pub partition: Partition,
    /// Value of each block, in block order.
    #[serde(rename = "primes")]
    pub block_values: Vec<u64>,
}

impl DiagonalOperator {
    /// Dimension of the operator (number of states).
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// 1-based block index owning each state, in state order.
    pub fn block_of_state(&self, state: StateIndex) -> Option<usize> {
        self.partition
            .blocks
            .iter()
            .position(|b| b.contains(&state))
            .map(|b| b + 1)
    }
}

/// Builds the diagonal operator for a balanced partition, giving block
/// `b` (in the partition's own block order) the value `values[b]`.
/// Values must be distinct and one per block; the partition must consist
/// of equally sized blocks exactly covering the state set.
pub fn nit_operator(partition: &Partition, values: &[u64]) -> Result<DiagonalOperator> {
    let n_blocks = partition.blocks.len();
    if values.len() != n_blocks {
        return Err(Error::InvalidParameter(format!(
            "got {} values for {} blocks",
            values.len(),
            n_blocks
        )));
    }
    let mut distinct = HashSet::new();
    for &v in values {
        if !distinct.insert(v) {
            return Err(Error::InvalidParameter(format!("value {v} repeats")));
        }
    }
    let n_states: usize = partition.blocks.iter().map(Vec::len).sum();
    let membership = partition.membership(n_states)?;
    let block_size = n_states / n_blocks.max(1);
    for (bi, block) in partition.blocks.iter().enumerate() {
        if block.len() != block_size {
            return Err(Error::InvalidParameter(format!(
                "partition is not balanced: block {} has {} states, expected {block_size}",
                bi + 1,
                block.len()
            )));
        }
    }
    let entries = membership.into_iter().map(|b| values[b]).collect();
    Ok(DiagonalOperator {
        entries,
        partition: partition.clone(),
        block_values: values.to_vec(),
    })
}

/// Builds the full family of diagonal operators for a nit set: row `j`
/// of the assignment labels partition `j`.
pub fn nit_operators_for(
    set: &NitSet,
    assignment: &PrimeAssignment,
) -> Result<Vec<DiagonalOperator>> {
    if assignment.partition_count() != set.partitions.len() {
        return Err(Error::PrimeAssignment(format!(
            "assignment has {} rows but the nit set has {} partitions",
            assignment.partition_count(),
            set.partitions.len()
        )));
    }
    set.partitions
        .iter()
        .zip(assignment.rows())
        .map(|(p, row)| nit_operator(p, row))
        .collect()
}

/// One decoded context eigenvalue: the state it identifies and the
/// 1-based block per partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecodeEntry {
    /// The context eigenvalue.
    pub value: u64,
    /// The state whose context entry this is.
    pub state: StateIndex,
    /// 1-based block index per partition, in family order.
    pub blocks: Vec<usize>,
}

/// The entrywise product of a family of diagonal operators; with
/// disjoint prime labels its entries are pairwise distinct, so one
/// measured eigenvalue pins down every individual outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextDiagonal {
    /// Diagonal entries, indexed by state.
    pub entries: Vec<u64>,
    factors: Vec<DiagonalOperator>,
}

impl ContextDiagonal {
    /// The operators whose product this is.
    pub fn factors(&self) -> &[DiagonalOperator] {
        &self.factors
    }

    /// Dimension of the operator.
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// The eigenvalue → (state, outcome tuple) table, in state order.
    pub fn decode_table(&self) -> Vec<DecodeEntry> {
        (1..=self.entries.len() as StateIndex)
            .map(|state| DecodeEntry {
                value: self.entries[state as usize - 1],
                state,
                blocks: self
                    .factors
                    .iter()
                    .map(|f| {
                        f.block_of_state(state)
                            .expect("context factors cover every state")
                    })
                    .collect(),
            })
            .collect()
    }
}

impl Serialize for ContextDiagonal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ContextDiagonal", 2)?;
        s.serialize_field("entries", &self.entries)?;
        s.serialize_field("decode_table", &self.decode_table())?;
        s.end()
    }
}

/// Multiplies a family of diagonal operators entrywise. The per-block
/// values must be disjoint across operators (otherwise distinctness of
/// the products cannot be guaranteed) and the result is re-checked to be
/// duplicate-free. Multiplication order never matters.
pub fn context_operator(ops: &[DiagonalOperator]) -> Result<ContextDiagonal> {
    if ops.is_empty() {
        return Err(Error::InvalidParameter(
            "context of an empty operator family".into(),
        ));
    }
    let dim = ops[0].dim();
    for op in ops {
        if op.dim() != dim {
            return Err(Error::DimensionMismatch(format!(
                "operators of dimension {} and {} cannot share a context",
                dim,
                op.dim()
            )));
        }
    }
    let mut seen = HashSet::new();
    for op in ops {
        for &v in &op.block_values {
            if !seen.insert(v) {
                return Err(Error::Composition(format!(
                    "value {v} is shared between operators; disjoint primes are required \
                     for unique factorization"
                )));
            }
        }
    }
    let mut entries = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut acc: u64 = 1;
        for op in ops {
            acc = acc.checked_mul(op.entries[i]).ok_or_else(|| {
                Error::Overflow(format!("context entry for state {} exceeds 64 bits", i + 1))
            })?;
        }
        entries.push(acc);
    }
    let mut distinct = HashSet::new();
    for (i, &e) in entries.iter().enumerate() {
        if !distinct.insert(e) {
            return Err(Error::Composition(format!(
                "context entries are not distinct: value {e} repeats at state {}",
                i + 1
            )));
        }
    }
    Ok(ContextDiagonal {
        entries,
        factors: ops.to_vec(),
    })
}

/// Decodes a context eigenvalue into the 1-based block index per
/// partition, by trial division over the assignment's primes. Exactly
/// one prime per row must divide the value, exactly once, and the
/// product of the found primes must reconstruct the value exactly.
pub fn decode_outcome(value: u64, assignment: &PrimeAssignment) -> Result<Vec<usize>> {
    if value == 0 {
        return Err(Error::Decode("0 has no prime factorization".into()));
    }
    let mut blocks = Vec::with_capacity(assignment.partition_count());
    let mut product: u64 = 1;
    for (j, row) in assignment.rows().iter().enumerate() {
        let mut hit: Option<(usize, u64)> = None;
        for (b, &q) in row.iter().enumerate() {
            if value.is_multiple_of(q) {
                if let Some((_, earlier)) = hit {
                    return Err(Error::Decode(format!(
                        "both {earlier} and {q} from partition {} divide {value}",
                        j + 1
                    )));
                }
                hit = Some((b, q));
            }
        }
        let (b, q) = hit.ok_or_else(|| {
            Error::Decode(format!("no prime of partition {} divides {value}", j + 1))
        })?;
        if (value as u128).is_multiple_of(q as u128 * q as u128) {
            return Err(Error::Decode(format!(
                "prime {q} divides {value} more than once"
            )));
        }
        blocks.push(b + 1);
        product = product.checked_mul(q).ok_or_else(|| {
            Error::Overflow(format!("product of decoded primes for {value} overflows"))
        })?;
    }
    if product != value {
        return Err(Error::Decode(format!(
            "{value} contains factors outside the assignment (decoded product {product})"
        )));
    }
    Ok(blocks)
}

/// The unique state lying in the chosen block of every partition
/// (1-based block indices, one per partition). The nit set must be
/// valid, which guarantees the intersection is a singleton.
pub fn state_of_outcome(outcome: &[usize], set: &NitSet) -> Result<StateIndex> {
    set.require_valid()?;
    let n = set.params.n() as usize;
    if outcome.len() != set.partitions.len() {
        return Err(Error::InvalidParameter(format!(
            "outcome has {} entries for {} partitions",
            outcome.len(),
            set.partitions.len()
        )));
    }
    for &b in outcome {
        if b < 1 || b > n {
            return Err(Error::InvalidParameter(format!(
                "block index {b} out of range 1..={n}"
            )));
        }
    }
    let mut states: Option<HashSet<StateIndex>> = None;
    for (p, &b) in set.partitions.iter().zip(outcome) {
        let block: HashSet<StateIndex> = p.blocks[b - 1].iter().copied().collect();
        states = Some(match states {
            None => block,
            Some(acc) => acc.intersection(&block).copied().collect(),
        });
    }
    let states = states.expect("outcome is nonempty");
    debug_assert_eq!(states.len(), 1, "a valid nit set separates every outcome");
    states
        .into_iter()
        .next()
        .ok_or_else(|| Error::InvalidParameter("empty block intersection".into()))
}

/// The 0/1 diagonal projectors onto the first block of each partition of
/// a two-outcome nit set. Substituting (1, 0) for the prime pair of each
/// partition only works when every partition has exactly two blocks;
/// other shapes are rejected.
pub fn binary_projectors(set: &NitSet) -> Result<Vec<DiagonalOperator>> {
    if set.params.n() != 2 {
        return Err(Error::Unsupported(format!(
            "projector form applies to the binary case only (n = 2), got n = {}",
            set.params.n()
        )));
    }
    set.require_valid()?;
    let n_states = set.params.state_count();
    set.partitions
        .iter()
        .map(|p| {
            let membership = p.membership(n_states)?;
            Ok(DiagonalOperator {
                entries: membership
                    .iter()
                    .map(|&b| if b == 0 { 1 } else { 0 })
                    .collect(),
                partition: p.clone(),
                block_values: vec![1, 0],
            })
        })
        .collect()
}
