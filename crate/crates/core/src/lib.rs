//! Determinants of complex matrices partitioned into `N × N` uniform blocks,
//! computed through a recursive Schur-complement construction and checked
//! against a dense LU oracle.
//!
//! The crate is organized bottom-up:
//!
//! * [`dense`], [`lu`], [`scaled`]: complex dense matrices, partially pivoted
//!   LU, and overflow-safe determinant values.
//! * [`block`]: the partitioned-matrix model and 2×2 Schur-complement /
//!   Banachiewicz primitives.
//! * [`engine`]: the alpha-table recursion and the block determinant product.
//! * [`njl`]: the 48×48 two-flavor NJL inverse propagator as a worked example.
//! * [`format`] and [`cli`]: file formats and the `blockdet` command line.

pub mod block;
pub mod cli;
pub mod dense;
pub mod engine;
pub mod error;
pub mod format;
pub mod lu;
pub mod njl;
pub mod random;
pub mod scaled;
pub mod tolerance;

pub use block::{
    assemble_2x2, banachiewicz_inverse, flatten, partition, schur_complement_2x2,
    trailing_submatrix, BlockInverse2x2, BlockMatrix, BlockVectorColumn, BlockVectorRow,
};
pub use dense::{DenseMatrix, C64};
pub use engine::{
    alpha_direct, alpha_recursion, block_det, det_2x2_anticommuting, det_2x2_closed,
    det_2x2_commuting, det_3x3_closed, AlphaTable, DetReport, OffDiagonal,
};
pub use error::{BlockDetError, Result};
pub use lu::{det_dense, invert, lu_decompose, solve, LuFactors};
pub use scaled::ScaledDet;
pub use tolerance::Tolerances;
