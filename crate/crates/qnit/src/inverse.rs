//! The inverse problem: observables for an arbitrary orthonormal basis.
//!
//! Given a target basis as the columns of a unitary `U`, conjugating the
//! integer diagonal operators by `U` (`F' = U·D·U†`) produces Hermitian
//! observables whose common eigenvectors are exactly the target states;
//! the context product's distinct integer eigenvalues then identify each
//! basis state by a single comeasurable query. [`build_w_basis`] supplies
//! the worked three-bit example whose second basis state is the W state.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::DiagonalOperator;

/// Entrywise tolerance for `U·U† = I`.
pub const UNITARY_TOL: f64 = 1e-10;
/// Entrywise tolerance for `M = M†`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Entrywise tolerance for eigenvector residuals and commutators.
pub const EIGEN_TOL: f64 = 1e-10;
/// Tolerance for rounding measured eigenvalues to integers.
pub const INTEGER_TOL: f64 = 1e-6;

type CMatrix = DMatrix<Complex64>;

fn max_entry_magnitude(m: &CMatrix) -> f64 {
    m.iter().map(|e| e.norm()).fold(0.0, f64::max)
}

/// An orthonormal target basis: column `j` is the `j`-th target state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "UnitaryWire", into = "UnitaryWire")]
pub struct UnitaryBasis {
    m: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct UnitaryWire {
    dim: usize,
    /// Row-major entries as `[re, im]` pairs.
    entries: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<UnitaryWire> for UnitaryBasis {
    type Error = Error;
    fn try_from(w: UnitaryWire) -> Result<Self> {
        if w.entries.len() != w.dim || w.entries.iter().any(|row| row.len() != w.dim) {
            return Err(Error::DimensionMismatch(format!(
                "entries do not form a {0}×{0} matrix",
                w.dim
            )));
        }
        let m = CMatrix::from_fn(w.dim, w.dim, |r, c| {
            Complex64::new(w.entries[r][c][0], w.entries[r][c][1])
        });
        UnitaryBasis::new(m)
    }
}

impl From<UnitaryBasis> for UnitaryWire {
    fn from(u: UnitaryBasis) -> Self {
        let dim = u.dim();
        UnitaryWire {
            dim,
            entries: (0..dim)
                .map(|r| (0..dim).map(|c| [u.m[(r, c)].re, u.m[(r, c)].im]).collect())
                .collect(),
        }
    }
}

impl UnitaryBasis {
    /// Validates squareness and `U·U† = I` within [`UNITARY_TOL`].
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "a basis matrix must be square and nonempty, got {}×{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let u = UnitaryBasis { m };
        let deviation = u.unitarity_deviation();
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary {
                max_deviation: deviation,
            });
        }
        Ok(u)
    }

    /// The identity basis: target states are the product states
    /// themselves.
    pub fn identity(dim: usize) -> UnitaryBasis {
        UnitaryBasis {
            m: CMatrix::identity(dim, dim),
        }
    }

    /// Largest entrywise deviation of `U·U†` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let product = &self.m * self.m.adjoint();
        let identity = CMatrix::identity(self.dim(), self.dim());
        max_entry_magnitude(&(product - identity))
    }

    /// Dimension of the basis.
    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    /// The underlying matrix.
    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    /// Target state `j` (0-based column).
    pub fn column(&self, j: usize) -> DVector<Complex64> {
        self.m.column(j).into_owned()
    }
}

/// The target basis whose second state is the W state: the two halves of
/// the state space each carry a uniform-superposition column plus its
/// orthogonal complement, and the first and last product states are kept
/// as-is.
pub fn build_w_basis() -> UnitaryBasis {
    let s3 = 1.0 / 3.0f64.sqrt();
    let s2 = 1.0 / 2.0f64.sqrt();
    let s6 = 1.0 / 6.0f64.sqrt();
    let rows: [[f64; 8]; 8] = [
        [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, s3, -s2, -s6, 0.0, 0.0, 0.0, 0.0],
        [0.0, s3, 0.0, 2.0 * s6, 0.0, 0.0, 0.0, 0.0],
        [0.0, s3, s2, -s6, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, s3, -s2, -s6, 0.0],
        [0.0, 0.0, 0.0, 0.0, s3, 0.0, 2.0 * s6, 0.0],
        [0.0, 0.0, 0.0, 0.0, s3, s2, -s6, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
    ];
    let m = CMatrix::from_fn(8, 8, |r, c| Complex64::new(rows[r][c], 0.0));
    UnitaryBasis::new(m).expect("the built-in basis is unitary")
}

/// A dense Hermitian observable.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    m: CMatrix,
}

impl DenseOperator {
    /// Validates squareness and `M = M†` within [`HERMITIAN_TOL`].
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "an observable must be square and nonempty, got {}×{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let deviation = max_entry_magnitude(&(&m - m.adjoint()));
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian {
                max_deviation: deviation,
            });
        }
        Ok(DenseOperator { m })
    }

    fn new_unchecked(m: CMatrix) -> Self {
        DenseOperator { m }
    }

    /// Dense embedding of an integer diagonal.
    pub fn from_diagonal(entries: &[u64]) -> DenseOperator {
        let dim = entries.len();
        DenseOperator {
            m: CMatrix::from_fn(dim, dim, |r, c| {
                if r == c {
                    Complex64::new(entries[r] as f64, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        }
    }

    /// Dimension of the operator.
    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    /// The underlying matrix.
    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    /// Largest off-diagonal magnitude (zero for a diagonal matrix).
    pub fn max_off_diagonal(&self) -> f64 {
        let mut max = 0.0f64;
        for r in 0..self.dim() {
            for c in 0..self.dim() {
                if r != c {
                    max = max.max(self.m[(r, c)].norm());
                }
            }
        }
        max
    }

    /// The diagonal as complex numbers.
    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.m[(i, i)]).collect()
    }
}

/// Conjugates each diagonal into the target basis: `Fᵢ' = U·Dᵢ·U†`.
/// Every output is Hermitian, has the same spectrum as its diagonal, and
/// has column `j` of `U` as an eigenvector with eigenvalue `Dᵢ[j]`.
pub fn conjugated_nit_operators(
    basis: &UnitaryBasis,
    diagonals: &[DiagonalOperator],
) -> Result<Vec<DenseOperator>> {
    let dim = basis.dim();
    let adjoint = basis.matrix().adjoint();
    diagonals
        .iter()
        .map(|d| {
            if d.dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "diagonal of length {} does not fit a {dim}-dimensional basis",
                    d.dim()
                )));
            }
            let dense = DenseOperator::from_diagonal(&d.entries);
            DenseOperator::new(basis.matrix() * dense.matrix() * &adjoint)
        })
        .collect()
}

/// The matrix product of the operators in the given order. For a family
/// conjugated from disjoint-prime diagonals the factors commute and the
/// result is the conjugated context diagonal; for non-commuting input
/// the product is returned as-is and need not be Hermitian.
pub fn context_dense(ops: &[DenseOperator]) -> Result<DenseOperator> {
    let first = ops
        .first()
        .ok_or_else(|| Error::InvalidParameter("context of an empty operator family".into()))?;
    let mut acc = first.matrix().clone();
    for op in &ops[1..] {
        if op.dim() != first.dim() {
            return Err(Error::DimensionMismatch(format!(
                "operators of dimension {} and {} cannot share a context",
                first.dim(),
                op.dim()
            )));
        }
        acc *= op.matrix();
    }
    Ok(DenseOperator::new_unchecked(acc))
}

/// Largest entrywise magnitude of `A·B − B·A`.
pub fn commutator_max_entry(a: &DenseOperator, b: &DenseOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "commutator of {}×{0} and {}×{1} operators",
            a.dim(),
            b.dim()
        )));
    }
    let ab = a.matrix() * b.matrix();
    let ba = b.matrix() * a.matrix();
    Ok(max_entry_magnitude(&(ab - ba)))
}

/// Pass/fail outcome of one numerical check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    /// Whether the check met its tolerance.
    pub pass: bool,
    /// Worst deviation observed.
    pub max_deviation: f64,
}

/// Outcome of the integer-eigenvalue check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenvalueCheck {
    /// Whether all eigenvalues rounded cleanly and are pairwise distinct.
    pub pass: bool,
    /// Worst distance from the nearest integer (including any imaginary
    /// part).
    pub max_integer_defect: f64,
    /// Rounded context eigenvalues, in basis-column order.
    pub values: Vec<i64>,
}

/// One row of the eigenvalue → basis-column decode table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecodeRow {
    /// Rounded context eigenvalue.
    pub value: i64,
    /// 1-based basis column it identifies.
    pub column: usize,
    /// 1-based block per operator, from the diagonals' partitions.
    pub blocks: Vec<usize>,
}

/// Outcome of the decode-bijection check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecodeCheck {
    /// Whether value → column is a bijection with resolvable blocks.
    pub pass: bool,
    /// The table, in basis-column order.
    pub table: Vec<DecodeRow>,
}

/// Full report of [`verify_separation`]: the four checks plus the
/// sensitivity of the context product to factor order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationReport {
    /// (a) every basis column is a common eigenvector of all conjugated
    /// operators.
    pub eigenvector_check: CheckOutcome,
    /// (b) all pairwise commutators vanish.
    pub commutation_check: CheckOutcome,
    /// (c) context eigenvalues are integers and duplicate-free.
    pub eigenvalue_check: EigenvalueCheck,
    /// (d) the eigenvalue → column decode table is a bijection.
    pub decode_check: DecodeCheck,
    /// Largest entrywise change of the context product under any factor
    /// reordering.
    pub cross_order_deviation: f64,
}

impl SeparationReport {
    /// True iff all four checks pass.
    pub fn all_pass(&self) -> bool {
        self.eigenvector_check.pass
            && self.commutation_check.pass
            && self.eigenvalue_check.pass
            && self.decode_check.pass
    }
}

/// Verifies that the conjugated family separates the target basis:
/// common eigenvectors, vanishing commutators, distinct integer context
/// eigenvalues, and a bijective decode table. Failures are reported, not
/// raised; only malformed inputs (dimension mismatches, an empty family)
/// are errors.
pub fn verify_separation(
    basis: &UnitaryBasis,
    diagonals: &[DiagonalOperator],
) -> Result<SeparationReport> {
    if diagonals.is_empty() {
        return Err(Error::InvalidParameter(
            "verification needs at least one operator".into(),
        ));
    }
    let dim = basis.dim();
    let conjugated = conjugated_nit_operators(basis, diagonals)?;

    // (a) Column j of U must satisfy Fᵢ'·φⱼ = Dᵢ[j]·φⱼ for every i.
    let mut eigen_dev = 0.0f64;
    for (d, f) in diagonals.iter().zip(&conjugated) {
        for j in 0..dim {
            let phi = basis.column(j);
            let residual = f.matrix() * &phi - phi.scale(d.entries[j] as f64);
            eigen_dev = eigen_dev.max(residual.iter().map(|e| e.norm()).fold(0.0, f64::max));
        }
    }

    // (b) Pairwise commutators.
    let mut comm_dev = 0.0f64;
    for i in 0..conjugated.len() {
        for j in i + 1..conjugated.len() {
            comm_dev = comm_dev.max(commutator_max_entry(&conjugated[i], &conjugated[j])?);
        }
    }

    // Context in the fixed order, and its sensitivity to reordering.
    let context = context_dense(&conjugated)?;
    let mut cross_order = 0.0f64;
    let mut order: Vec<u32> = (1..=conjugated.len() as u32).collect();
    while crate::enumerate::next_permutation(&mut order) {
        let reordered: Vec<DenseOperator> = order
            .iter()
            .map(|&i| conjugated[i as usize - 1].clone())
            .collect();
        let alt = context_dense(&reordered)?;
        cross_order = cross_order.max(max_entry_magnitude(&(context.matrix() - alt.matrix())));
    }

    // (c) Integer eigenvalues via the quadratic form on each column.
    let mut max_defect = 0.0f64;
    let mut values = Vec::with_capacity(dim);
    for j in 0..dim {
        let phi = basis.column(j);
        let val: Complex64 = (phi.adjoint() * context.matrix() * &phi)[(0, 0)];
        let rounded = val.re.round();
        max_defect = max_defect.max((val.re - rounded).abs().max(val.im.abs()));
        values.push(rounded as i64);
    }
    let mut sorted = values.clone();
    sorted.sort_unstable();
    sorted.dedup();
    let distinct = sorted.len() == values.len();
    let rounding_ok = max_defect <= INTEGER_TOL;

    // (d) Decode table: eigenvalue → column, with the outcome tuple read
    // off the diagonals' partitions.
    let mut blocks_ok = true;
    let table: Vec<DecodeRow> = (0..dim)
        .map(|j| {
            let blocks: Vec<usize> = diagonals
                .iter()
                .map(|d| match d.block_of_state((j + 1) as u32) {
                    Some(b) => b,
                    None => {
                        blocks_ok = false;
                        0
                    }
                })
                .collect();
            DecodeRow {
                value: values[j],
                column: j + 1,
                blocks,
            }
        })
        .collect();

    Ok(SeparationReport {
        eigenvector_check: CheckOutcome {
            pass: eigen_dev <= EIGEN_TOL,
            max_deviation: eigen_dev,
        },
        commutation_check: CheckOutcome {
            pass: comm_dev <= EIGEN_TOL,
            max_deviation: comm_dev,
        },
        eigenvalue_check: EigenvalueCheck {
            pass: rounding_ok && distinct,
            max_integer_defect: max_defect,
            values: values.clone(),
        },
        decode_check: DecodeCheck {
            pass: rounding_ok && distinct && blocks_ok,
            table,
        },
        cross_order_deviation: cross_order,
    })
}
