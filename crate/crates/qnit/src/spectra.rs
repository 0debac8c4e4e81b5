//! Block eigenstates and their entanglement classification.
//!
//! Each block of a partition carries a representative eigenstate: the
//! uniform superposition over the block's basis states. Whether that
//! state factorizes over the particles is decided numerically by the
//! Schmidt rank — the number of significant singular values of the
//! amplitude matrix under a bipartition. Rank 1 means a product state;
//! anything higher means entanglement across that split.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::partitions::{NitSet, StateIndex};

/// Default relative singular-value cutoff: values below
/// `SCHMIDT_TOL × σ_max` count as zero.
pub const SCHMIDT_TOL: f64 = 1e-8;

/// Tolerance on the squared norm of a state vector.
pub const NORM_TOL: f64 = 1e-10;

/// A pure state: complex amplitudes over the lexicographically ordered
/// product basis, normalized to unit length.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Validates unit norm (squared norm within [`NORM_TOL`] of 1).
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidParameter("empty state vector".into()));
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!(
                "state vector is not normalized: squared norm {norm_sq}"
            )));
        }
        Ok(StateVector { amplitudes })
    }

    /// The amplitudes in basis order.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }
}

/// A split of the product space into a left and a right factor, with the
/// left factor indexing rows of the reshaped amplitude matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BipartitionDims {
    left: usize,
    right: usize,
}

impl BipartitionDims {
    /// Both sides must have dimension at least 2 for the Schmidt test to
    /// say anything.
    pub fn new(left: usize, right: usize) -> Result<Self> {
        if left < 2 || right < 2 {
            return Err(Error::InvalidParameter(format!(
                "bipartition {left}×{right} has a trivial side; both must be ≥ 2"
            )));
        }
        Ok(BipartitionDims { left, right })
    }

    /// Row dimension of the reshaped amplitude matrix.
    pub fn left(&self) -> usize {
        self.left
    }

    /// Column dimension of the reshaped amplitude matrix.
    pub fn right(&self) -> usize {
        self.right
    }
}

/// The uniform superposition over a block's basis states: amplitude
/// `1/√|b|` on every state of the block, zero elsewhere.
pub fn block_representative_state(block: &[StateIndex], n_states: usize) -> Result<StateVector> {
    if block.is_empty() {
        return Err(Error::InvalidParameter(
            "a block representative needs a nonempty block".into(),
        ));
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); n_states];
    let weight = Complex64::new(1.0 / (block.len() as f64).sqrt(), 0.0);
    for &s in block {
        if s < 1 || s as usize > n_states {
            return Err(Error::InvalidParameter(format!(
                "state {s} out of range 1..={n_states}"
            )));
        }
        let slot = &mut amplitudes[s as usize - 1];
        if slot.norm_sqr() != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "state {s} listed twice in the block"
            )));
        }
        *slot = weight;
    }
    StateVector::new(amplitudes)
}

/// Number of singular values above `tol × σ_max`.
fn significant_rank(m: &DMatrix<Complex64>, tol: f64) -> usize {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0f64, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * max).count()
}

/// Schmidt rank of a state across a bipartition: the amplitudes are
/// reshaped into a `left × right` matrix (row = left-factor index, both
/// factors in lexicographic order) and the singular values above
/// `tol × σ_max` are counted. Rank 1 means the state is a product across
/// this split.
pub fn schmidt_rank(v: &StateVector, dims: BipartitionDims, tol: f64) -> Result<usize> {
    let (left, right) = (dims.left(), dims.right());
    if left * right != v.dim() {
        return Err(Error::DimensionMismatch(format!(
            "bipartition {left}×{right} does not match vector dimension {}",
            v.dim()
        )));
    }
    let m = DMatrix::from_fn(left, right, |r, c| v.amplitudes[r * right + c]);
    Ok(significant_rank(&m, tol))
}

/// Amplitude matrix with factor `j` (0-based) as rows and the remaining
/// factors, in their original order, collapsed into columns.
fn factor_vs_rest_matrix(v: &StateVector, factor_dims: &[usize], j: usize) -> DMatrix<Complex64> {
    let total = v.dim();
    let left = factor_dims[j];
    let right = total / left;
    let mut m = DMatrix::from_element(left, right, Complex64::new(0.0, 0.0));
    for (i, &a) in v.amplitudes.iter().enumerate() {
        let mut rest = i;
        let mut digits = vec![0usize; factor_dims.len()];
        for (f, &d) in factor_dims.iter().enumerate().rev() {
            digits[f] = rest % d;
            rest /= d;
        }
        let row = digits[j];
        let mut col = 0usize;
        for (f, &d) in factor_dims.iter().enumerate() {
            if f != j {
                col = col * d + digits[f];
            }
        }
        m[(row, col)] = a;
    }
    m
}

/// Schmidt rank of every single-factor-vs-rest split, in factor order.
/// Empty for a single factor, where no split exists.
pub fn single_factor_ranks(v: &StateVector, factor_dims: &[usize], tol: f64) -> Result<Vec<usize>> {
    let total: usize = factor_dims.iter().product();
    if total != v.dim() {
        return Err(Error::DimensionMismatch(format!(
            "factor dimensions {factor_dims:?} do not match vector dimension {}",
            v.dim()
        )));
    }
    if factor_dims.iter().any(|&d| d < 2) {
        return Err(Error::InvalidParameter(
            "every factor dimension must be at least 2".into(),
        ));
    }
    if factor_dims.len() < 2 {
        return Ok(Vec::new());
    }
    Ok((0..factor_dims.len())
        .map(|j| significant_rank(&factor_vs_rest_matrix(v, factor_dims, j), tol))
        .collect())
}

/// True iff the state factorizes over all factors: every
/// single-factor-vs-rest split has Schmidt rank 1. A single factor is a
/// product by convention (no split exists).
pub fn is_product_state(v: &StateVector, factor_dims: &[usize], tol: f64) -> Result<bool> {
    Ok(single_factor_ranks(v, factor_dims, tol)?
        .iter()
        .all(|&r| r == 1))
}

/// Classification of one block's representative eigenstate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockReport {
    /// 1-based partition index within the family.
    pub partition: usize,
    /// 1-based block index within the partition.
    pub block: usize,
    /// The block's states.
    pub states: Vec<StateIndex>,
    /// Schmidt rank per single-particle-vs-rest split (empty for one
    /// particle).
    pub schmidt_ranks: Vec<usize>,
    /// True iff the representative factorizes over all particles.
    pub product: bool,
}

/// Classifies the representative eigenstate of every block of every
/// partition of a valid nit set as product or entangled.
pub fn classify_nit_set_eigenstates(set: &NitSet, tol: f64) -> Result<Vec<BlockReport>> {
    set.require_valid()?;
    let n_states = set.params.state_count();
    let factor_dims = vec![set.params.n() as usize; set.params.k() as usize];
    let mut reports = Vec::new();
    for (pi, partition) in set.partitions.iter().enumerate() {
        for (bi, block) in partition.blocks.iter().enumerate() {
            let rep = block_representative_state(block, n_states)?;
            let schmidt_ranks = single_factor_ranks(&rep, &factor_dims, tol)?;
            let product = schmidt_ranks.iter().all(|&r| r == 1);
            reports.push(BlockReport {
                partition: pi + 1,
                block: bi + 1,
                states: block.clone(),
                schmidt_ranks,
                product,
            });
        }
    }
    Ok(reports)
}
