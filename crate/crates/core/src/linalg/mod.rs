//! Exact integer linear algebra: matrices, Smith normal form, abelian groups
//! and homology of integer chain complexes.

mod abelian;
mod complex;
mod matrix;
mod smith;

use num_bigint::BigInt;
use thiserror::Error;

pub use abelian::{AbelianGroup, PrimaryDecomposition, PrimePower};
pub use complex::{cokernel, IntChainComplex};
pub use matrix::IntMatrix;
pub use smith::{smith_normal_form, SmithForm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("{rows}x{cols} matrix needs {} entries, got {len}", rows * cols)]
    EntryCount { rows: usize, cols: usize, len: usize },
    #[error("rows have different lengths")]
    RaggedRows,
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: (usize, usize), right: (usize, usize) },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not unimodular (det = {det})")]
    NotUnimodular { det: BigInt },
    #[error("d∘d ≠ 0 at the differential leaving degree {degree}")]
    ComplexInvalid { degree: usize },
    #[error("malformed chain complex: {0}")]
    ComplexShape(String),
    #[error("degree {degree} outside 0..={top}")]
    DegreeOutOfRange { degree: usize, top: usize },
    #[error("not a canonical group: {0}")]
    NotCanonical(String),
    #[error("cannot parse abelian group {0:?}")]
    Parse(String),
}
