//! Nit sets: balanced state partitions with the separation properties.
//!
//! A `k`-particle system with `n` outcomes per particle has `N = n^k`
//! product states, labelled `1..=N` in lexicographic tensor order (digit
//! `j` of `s - 1` in base `n`, most significant digit = particle 1). A
//! *nit set* is a family of `k` partitions of `{1..N}`, each into `n`
//! blocks of `n^(k-1)` states, such that
//!
//! * (i) choosing one block per partition, the `k`-fold intersection
//!   contains exactly one state, and
//! * (ii) the union of all those singletons is the whole state set.
//!
//! Each partition is then the outcome structure of one `n`-ary observable,
//! and the family determines every product state by `k` queries.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// 1-based index of a product state, `1..=n^k`.
pub type StateIndex = u32;

/// Largest supported state count; keeps exhaustive machinery honest.
pub const MAX_STATES: u64 = 1 << 20;

/// System shape: `n` outcomes per particle, `k` particles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NitParams {
    n: u32,
    k: u32,
}

impl NitParams {
    /// Validates `n >= 2`, `k >= 1` and that `n^k` stays within
    /// [`MAX_STATES`].
    pub fn new(n: u32, k: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "n must be at least 2 (a 1-outcome observable carries no information), got {n}"
            )));
        }
        if k < 1 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        let mut states: u64 = 1;
        for _ in 0..k {
            states = states.saturating_mul(n as u64);
            if states > MAX_STATES {
                return Err(Error::InvalidParameter(format!(
                    "state count {n}^{k} exceeds the supported maximum {MAX_STATES}"
                )));
            }
        }
        Ok(NitParams { n, k })
    }

    /// Outcomes per particle.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Particle count.
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Total number of product states, `n^k`.
    pub fn state_count(&self) -> usize {
        (self.n as u64).pow(self.k) as usize
    }

    /// Block size of a balanced partition, `n^(k-1)`.
    pub fn block_size(&self) -> usize {
        (self.n as u64).pow(self.k - 1) as usize
    }

    /// Digit `j` (1-based, most significant first) of `s - 1` in base `n`;
    /// this is the 0-based block index of state `s` in canonical partition
    /// `j`.
    pub fn digit(&self, s: StateIndex, j: u32) -> usize {
        debug_assert!(j >= 1 && j <= self.k);
        let place = (self.n as u64).pow(self.k - j);
        ((s as u64 - 1) / place % self.n as u64) as usize
    }
}

/// One partition of the state set into blocks (one block per outcome).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition {
    /// The blocks; semantically a set of disjoint sets of states.
    pub blocks: Vec<Vec<StateIndex>>,
}

impl Partition {
    /// Canonical form: elements sorted within each block, blocks ordered by
    /// their minimum element.
    pub fn canonicalize(&self) -> Partition {
        let mut blocks: Vec<Vec<StateIndex>> = self
            .blocks
            .iter()
            .map(|b| {
                let mut b = b.clone();
                b.sort_unstable();
                b
            })
            .collect();
        blocks.sort();
        Partition { blocks }
    }

    /// 0-based block index of each state, or an error description when the
    /// blocks do not exactly cover `1..=n_states`.
    pub fn membership(&self, n_states: usize) -> Result<Vec<usize>> {
        let mut owner: Vec<Option<usize>> = vec![None; n_states];
        for (bi, block) in self.blocks.iter().enumerate() {
            for &s in block {
                if s < 1 || s as usize > n_states {
                    return Err(Error::InvalidParameter(format!(
                        "state {s} out of range 1..={n_states}"
                    )));
                }
                if owner[s as usize - 1].is_some() {
                    return Err(Error::InvalidParameter(format!(
                        "state {s} appears in more than one block"
                    )));
                }
                owner[s as usize - 1] = Some(bi);
            }
        }
        owner
            .into_iter()
            .enumerate()
            .map(|(i, o)| {
                o.ok_or_else(|| Error::InvalidParameter(format!("state {} is not covered", i + 1)))
            })
            .collect()
    }
}

/// A family of `k` partitions meant to satisfy the separation properties.
///
/// The struct itself is plain data: families read from files may violate
/// the invariants, and [`NitSet::validate`] reports exactly how. The
/// family is semantically *unordered* and blocks are unlabeled; equality
/// of nit sets is equality of [`NitSet::canonicalize`] outputs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "NitSetWire", into = "NitSetWire")]
pub struct NitSet {
    /// System shape.
    pub params: NitParams,
    /// The partitions, one per observable.
    pub partitions: Vec<Partition>,
}

#[derive(Serialize, Deserialize)]
struct NitSetWire {
    n: u32,
    k: u32,
    partitions: Vec<Vec<Vec<StateIndex>>>,
}

impl TryFrom<NitSetWire> for NitSet {
    type Error = Error;

    fn try_from(w: NitSetWire) -> Result<Self> {
        Ok(NitSet {
            params: NitParams::new(w.n, w.k)?,
            partitions: w
                .partitions
                .into_iter()
                .map(|blocks| Partition { blocks })
                .collect(),
        })
    }
}

impl From<NitSet> for NitSetWire {
    fn from(s: NitSet) -> Self {
        NitSetWire {
            n: s.params.n(),
            k: s.params.k(),
            partitions: s.partitions.into_iter().map(|p| p.blocks).collect(),
        }
    }
}

/// The canonical nit set: partition `j` groups states by digit `j` of
/// `s - 1` in base `n` (most significant digit = particle 1). Its blocks
/// are single-particle propositions and its eigenstates are unentangled
/// product states.
pub fn canonical_nit_set(params: NitParams) -> NitSet {
    let n = params.n() as usize;
    let n_states = params.state_count();
    let block = params.block_size();
    let mut partitions = Vec::with_capacity(params.k() as usize);
    for j in 1..=params.k() {
        let mut blocks = vec![Vec::with_capacity(block); n];
        for s in 1..=n_states as StateIndex {
            blocks[params.digit(s, j)].push(s);
        }
        partitions.push(Partition { blocks });
    }
    NitSet { params, partitions }
}

/// A structural defect: the family is not even a balanced partition
/// family, before any separation question arises.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StructuralViolation {
    /// The family does not contain exactly `k` partitions.
    WrongPartitionCount { expected: usize, found: usize },
    /// A partition does not have exactly `n` blocks.
    WrongBlockCount {
        partition: usize,
        expected: usize,
        found: usize,
    },
    /// A block does not have exactly `n^(k-1)` states.
    UnbalancedBlock {
        partition: usize,
        block: usize,
        expected: usize,
        found: usize,
    },
    /// A state index outside `1..=n^k`.
    OutOfRange { partition: usize, state: StateIndex },
    /// A state listed twice within one partition.
    DuplicateState { partition: usize, state: StateIndex },
    /// A state missing from a partition.
    MissingState { partition: usize, state: StateIndex },
}

impl fmt::Display for StructuralViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use StructuralViolation::*;
        match self {
            WrongPartitionCount { expected, found } => {
                write!(f, "expected {expected} partitions, found {found}")
            }
            WrongBlockCount {
                partition,
                expected,
                found,
            } => write!(
                f,
                "partition {partition}: expected {expected} blocks, found {found}"
            ),
            UnbalancedBlock {
                partition,
                block,
                expected,
                found,
            } => write!(
                f,
                "partition {partition}, block {block}: expected {expected} states, found {found}"
            ),
            OutOfRange { partition, state } => {
                write!(f, "partition {partition}: state {state} out of range")
            }
            DuplicateState { partition, state } => {
                write!(f, "partition {partition}: state {state} listed twice")
            }
            MissingState { partition, state } => {
                write!(f, "partition {partition}: state {state} not covered")
            }
        }
    }
}

/// A block combination whose intersection is not a single state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationViolation {
    /// 1-based block choice, one per partition in family order.
    pub blocks: Vec<usize>,
    /// Size of the corresponding intersection.
    pub size: usize,
}

impl fmt::Display for SeparationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "blocks ({}) intersect in {} states, expected exactly 1",
            self.blocks
                .iter()
                .map(|b| b.to_string())
                .collect::<Vec<_>>()
                .join(", "),
            self.size
        )
    }
}

/// Outcome of [`NitSet::validate`]: structural defects and separation
/// defects, reported separately.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    /// True iff both violation lists are empty.
    pub valid: bool,
    /// Defects in the partition structure itself.
    pub structural: Vec<StructuralViolation>,
    /// Block combinations violating the separation properties. Only
    /// computed when the structure is sound.
    pub separation: Vec<SeparationViolation>,
}

impl ValidityReport {
    /// True iff the family is a valid nit set.
    pub fn is_valid(&self) -> bool {
        self.valid
    }
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.valid {
            return write!(f, "valid nit set");
        }
        if !self.structural.is_empty() {
            writeln!(f, "structural violations:")?;
            for v in &self.structural {
                writeln!(f, "  {v}")?;
            }
        }
        if !self.separation.is_empty() {
            writeln!(f, "separation violations:")?;
            for v in &self.separation {
                writeln!(f, "  {v}")?;
            }
        }
        Ok(())
    }
}

impl NitSet {
    /// Checks the family against the nit-set invariants and reports every
    /// defect. Structural problems (wrong counts, unbalanced blocks,
    /// missing or duplicated states) are reported separately from
    /// separation problems (block combinations whose intersection is not a
    /// singleton); the separation scan runs only on structurally sound
    /// input.
    pub fn validate(&self) -> ValidityReport {
        let n = self.params.n() as usize;
        let k = self.params.k() as usize;
        let n_states = self.params.state_count();
        let block_size = self.params.block_size();
        let mut structural = Vec::new();

        if self.partitions.len() != k {
            structural.push(StructuralViolation::WrongPartitionCount {
                expected: k,
                found: self.partitions.len(),
            });
        }

        let mut memberships: Vec<Vec<usize>> = Vec::with_capacity(self.partitions.len());
        for (pi, partition) in self.partitions.iter().enumerate() {
            let pno = pi + 1;
            if partition.blocks.len() != n {
                structural.push(StructuralViolation::WrongBlockCount {
                    partition: pno,
                    expected: n,
                    found: partition.blocks.len(),
                });
            }
            let mut owner: Vec<Option<usize>> = vec![None; n_states];
            for (bi, block) in partition.blocks.iter().enumerate() {
                if block.len() != block_size {
                    structural.push(StructuralViolation::UnbalancedBlock {
                        partition: pno,
                        block: bi + 1,
                        expected: block_size,
                        found: block.len(),
                    });
                }
                for &s in block {
                    if s < 1 || s as usize > n_states {
                        structural.push(StructuralViolation::OutOfRange {
                            partition: pno,
                            state: s,
                        });
                    } else if owner[s as usize - 1].is_some() {
                        structural.push(StructuralViolation::DuplicateState {
                            partition: pno,
                            state: s,
                        });
                    } else {
                        owner[s as usize - 1] = Some(bi);
                    }
                }
            }
            for (i, o) in owner.iter().enumerate() {
                if o.is_none() {
                    structural.push(StructuralViolation::MissingState {
                        partition: pno,
                        state: (i + 1) as StateIndex,
                    });
                }
            }
            memberships.push(owner.into_iter().map(|o| o.unwrap_or(0)).collect());
        }

        let mut separation = Vec::new();
        if structural.is_empty() {
            // Property (i): each of the n^k block combinations must contain
            // exactly one state. Counting states per combination covers (ii)
            // too: a combination with 0 states forces another with >= 2.
            let mut counts = vec![0u32; n_states];
            for s in 0..n_states {
                let mut idx = 0usize;
                for m in &memberships {
                    idx = idx * n + m[s];
                }
                counts[idx] += 1;
            }
            for (idx, &count) in counts.iter().enumerate() {
                if count != 1 {
                    let mut blocks = vec![0usize; k];
                    let mut rest = idx;
                    for j in (0..k).rev() {
                        blocks[j] = rest % n + 1;
                        rest /= n;
                    }
                    separation.push(SeparationViolation {
                        blocks,
                        size: count as usize,
                    });
                }
            }
        }

        ValidityReport {
            valid: structural.is_empty() && separation.is_empty(),
            structural,
            separation,
        }
    }

    /// Shortcut for `validate().is_valid()`.
    pub fn is_valid(&self) -> bool {
        self.validate().is_valid()
    }

    /// Returns the same set with `validate()` enforced, for operations
    /// that require a valid input.
    pub fn require_valid(&self) -> Result<&Self> {
        let report = self.validate();
        if report.is_valid() {
            Ok(self)
        } else {
            Err(Error::InvalidNitSet(report))
        }
    }

    /// Relabels every state by `p`: each block `B` becomes its elementwise
    /// image `p(B)`. Block and partition order are preserved (elements are
    /// kept sorted within blocks); validity is preserved because a
    /// relabeling maps singleton intersections to singleton intersections.
    pub fn apply_state_permutation(&self, p: &Permutation) -> Result<NitSet> {
        let n_states = self.params.state_count();
        if p.len() != n_states {
            return Err(Error::InvalidParameter(format!(
                "permutation acts on {} states but the nit set has {}",
                p.len(),
                n_states
            )));
        }
        let mut partitions = Vec::with_capacity(self.partitions.len());
        for partition in &self.partitions {
            let mut blocks = Vec::with_capacity(partition.blocks.len());
            for block in &partition.blocks {
                let mut image = Vec::with_capacity(block.len());
                for &s in block {
                    if s < 1 || s as usize > n_states {
                        return Err(Error::InvalidParameter(format!(
                            "state {s} out of range 1..={n_states}"
                        )));
                    }
                    image.push(p.apply(s));
                }
                image.sort_unstable();
                blocks.push(image);
            }
            partitions.push(Partition { blocks });
        }
        Ok(NitSet {
            params: self.params,
            partitions,
        })
    }

    /// Canonical form: within each partition blocks are sorted ascending
    /// and ordered by minimum element; the partitions themselves are
    /// ordered lexicographically by their flattened block lists. Two nit
    /// sets denote the same family iff their canonical forms are equal.
    pub fn canonicalize(&self) -> NitSet {
        let mut partitions: Vec<Partition> = self
            .partitions
            .iter()
            .map(Partition::canonicalize)
            .collect();
        partitions.sort();
        NitSet {
            params: self.params,
            partitions,
        }
    }
}

/// Convenience constructor used pervasively in tests and the CLI: a nit
/// set from raw block lists.
pub fn nit_set_from_blocks(
    n: u32,
    k: u32,
    partitions: Vec<Vec<Vec<StateIndex>>>,
) -> Result<NitSet> {
    Ok(NitSet {
        params: NitParams::new(n, k)?,
        partitions: partitions
            .into_iter()
            .map(|blocks| Partition { blocks })
            .collect(),
    })
}
