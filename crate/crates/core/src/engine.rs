//! Block determinant engine.
//!
//! For `S` partitioned into `N × N` blocks, the alpha tables are
//!
//! ```text
//! α⁽⁰⁾_ij   = S_ij
//! α⁽ᵏ⁺¹⁾_ij = α⁽ᵏ⁾_ij − α⁽ᵏ⁾_{i,N−k} (α⁽ᵏ⁾_{N−k,N−k})⁻¹ α⁽ᵏ⁾_{N−k,j}     1 ≤ i, j ≤ N−k−1
//! ```
//!
//! Each level eliminates the highest-index block row and column, and
//!
//! ```text
//! det S = ∏_{k=1..N} det α⁽ᴺ⁻ᵏ⁾_kk
//! ```
//!
//! The same tables can be computed without recursion from the trailing
//! submatrix `S̃_k`: `α⁽ᵏ⁾_ij = S_ij − σᵀ_{i,N−k+1} S̃_k⁻¹ s_{N−k+1,j}`. Both routes
//! are exposed ([`alpha_recursion`], [`alpha_direct`]) so they can be checked
//! against each other.

use crate::block::{flatten, schur_complement_2x2_with, trailing_submatrix, BlockMatrix};
use crate::dense::DenseMatrix;
use crate::error::{BlockDetError, Result};
use crate::lu::{det_dense_with, lu_decompose_with, solve_with};
use crate::scaled::ScaledDet;
use crate::tolerance::Tolerances;

/// One level `α⁽ᵏ⁾` of the recursion: an `(N−k) × (N−k)` block matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaTable {
    level: usize,
    blocks: BlockMatrix,
}

impl AlphaTable {
    pub fn level(&self) -> usize {
        self.level
    }

    /// Number of block rows, `N − k`.
    pub fn size(&self) -> usize {
        self.blocks.block_count()
    }

    /// `α⁽ᵏ⁾_ij`, 1-based.
    pub fn block(&self, i: usize, j: usize) -> &DenseMatrix {
        self.blocks.block(i, j)
    }

    pub fn as_block_matrix(&self) -> &BlockMatrix {
        &self.blocks
    }

    /// The block this level inverts, `α⁽ᵏ⁾_{N−k,N−k}`.
    pub fn pivot(&self) -> &DenseMatrix {
        let m = self.size();
        self.blocks.block(m, m)
    }
}

/// Determinant with its per-level breakdown.
#[derive(Debug, Clone)]
pub struct DetReport {
    pub value: ScaledDet,
    /// `factors[k−1] = det α⁽ᴺ⁻ᵏ⁾_kk` for `k = 1..=N`.
    pub factors: Vec<ScaledDet>,
    /// Ratio of largest to smallest `|u_ii|` in each factor's LU, same order
    /// as `factors`.
    pub condition_estimates: Vec<f64>,
}

pub fn alpha_recursion(bm: &BlockMatrix) -> Result<Vec<AlphaTable>> {
    alpha_recursion_with(bm, &Tolerances::default())
}

/// All tables `α⁽⁰⁾ … α⁽ᴺ⁻¹⁾`. Fails on the first pivot block that does not
/// pass the pivot tolerance.
pub fn alpha_recursion_with(bm: &BlockMatrix, tol: &Tolerances) -> Result<Vec<AlphaTable>> {
    let count = bm.block_count();
    let mut tables = Vec::with_capacity(count);
    tables.push(AlphaTable {
        level: 0,
        blocks: bm.clone(),
    });

    for level in 0..count.saturating_sub(1) {
        let current = &tables[level];
        let m = current.size();
        let pivot_lu = lu_decompose_with(current.pivot(), tol)?;
        if pivot_lu.is_singular() {
            return Err(BlockDetError::SingularPivotBlock { level, index: m });
        }
        // (α_mm)⁻¹ α_mj for every j < m in one solve
        let last_row: Vec<&DenseMatrix> = (1..m).map(|j| current.block(m, j)).collect();
        let solved = pivot_lu.solve(&DenseMatrix::hstack(&last_row)?)?;
        let n = bm.block_size();

        let next = BlockMatrix::from_fn(m - 1, n, |i, j| {
            let coupling = current.block(i, m);
            let correction = if coupling.is_zero() {
                None
            } else {
                let x = solved.submatrix(0, (j - 1) * n, n, n).expect("in range");
                Some(coupling.matmul(&x).expect("n x n"))
            };
            match correction {
                Some(c) => current.block(i, j).matsub(&c).expect("n x n"),
                None => current.block(i, j).clone(),
            }
        })?;
        tables.push(AlphaTable {
            level: level + 1,
            blocks: next,
        });
    }
    Ok(tables)
}

pub fn alpha_direct(bm: &BlockMatrix, k: usize, i: usize, j: usize) -> Result<DenseMatrix> {
    alpha_direct_with(bm, k, i, j, &Tolerances::default())
}

/// `α⁽ᵏ⁾_ij` from the trailing submatrix `S̃_k`, without recursion. The
/// `S̃_k⁻¹ s` product is a single `(k·n)`-dimensional solve.
pub fn alpha_direct_with(
    bm: &BlockMatrix,
    k: usize,
    i: usize,
    j: usize,
    tol: &Tolerances,
) -> Result<DenseMatrix> {
    let count = bm.block_count();
    if k >= count || !(1..=count - k).contains(&i) || !(1..=count - k).contains(&j) {
        return Err(BlockDetError::IndexOutOfRange(format!(
            "alpha^({k})_({i},{j}) for N = {count}"
        )));
    }
    let s_ij = bm.block(i, j);
    if k == 0 {
        return Ok(s_ij.clone());
    }
    let first = count - k + 1;
    let sigma = bm.row_vector(i, first)?.to_dense()?;
    let s = bm.column_vector(first, j)?.to_dense()?;
    let trailing = flatten(&trailing_submatrix(bm, k)?);
    let x = solve_with(&trailing, &s, tol)?;
    s_ij.matsub(&sigma.matmul(&x)?)
}

pub fn block_det(bm: &BlockMatrix) -> Result<DetReport> {
    block_det_with(bm, &Tolerances::default())
}

/// `det S = ∏_{k=1..N} det α⁽ᴺ⁻ᵏ⁾_kk` over the recursively built tables.
pub fn block_det_with(bm: &BlockMatrix, tol: &Tolerances) -> Result<DetReport> {
    let tables = alpha_recursion_with(bm, tol)?;
    report_from_tables(&tables, tol)
}

/// Builds the determinant report from already computed tables.
pub fn report_from_tables(tables: &[AlphaTable], tol: &Tolerances) -> Result<DetReport> {
    let count = tables.len();
    let mut factors = Vec::with_capacity(count);
    let mut condition_estimates = Vec::with_capacity(count);
    for k in 1..=count {
        let lu = lu_decompose_with(tables[count - k].block(k, k), tol)?;
        factors.push(lu.determinant());
        condition_estimates.push(lu.pivot_ratio());
    }
    Ok(DetReport {
        value: factors.iter().copied().product(),
        factors,
        condition_estimates,
    })
}

fn require_block_count(bm: &BlockMatrix, expected: usize) -> Result<()> {
    if bm.block_count() == expected {
        Ok(())
    } else {
        Err(BlockDetError::DimensionMismatch(format!(
            "expected a {expected}x{expected} block matrix, got {0}x{0}",
            bm.block_count()
        )))
    }
}

pub fn det_2x2_closed(bm: &BlockMatrix) -> Result<ScaledDet> {
    det_2x2_closed_with(bm, &Tolerances::default())
}

/// `det(S_11 − S_12 S_22⁻¹ S_21) · det(S_22)`.
pub fn det_2x2_closed_with(bm: &BlockMatrix, tol: &Tolerances) -> Result<ScaledDet> {
    require_block_count(bm, 2)?;
    let schur = schur_complement_2x2_with(
        bm.block(1, 1),
        bm.block(1, 2),
        bm.block(2, 1),
        bm.block(2, 2),
        tol,
    )?;
    Ok(det_dense_with(&schur, tol)? * det_dense_with(bm.block(2, 2), tol)?)
}

/// Which off-diagonal block of a 2×2 block matrix carries the (anti)commutation
/// relation with `S_22`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OffDiagonal {
    S12,
    S21,
}

fn check_relation(x: &DenseMatrix, y: &DenseMatrix, anti: bool, tol: &Tolerances) -> Result<()> {
    let xy = x.matmul(y)?;
    let yx = y.matmul(x)?;
    let residual = if anti {
        xy.matadd(&yx)?
    } else {
        xy.matsub(&yx)?
    }
    .max_abs();
    let threshold = tol.commutator_relative * xy.max_abs().max(yx.max_abs());
    if residual <= threshold {
        Ok(())
    } else {
        Err(BlockDetError::CommutatorViolation {
            residual,
            threshold,
        })
    }
}

pub fn det_2x2_commuting(bm: &BlockMatrix, which: OffDiagonal) -> Result<ScaledDet> {
    det_2x2_commuting_with(bm, which, &Tolerances::default())
}

/// Single-determinant form when the designated block commutes with `S_22`:
///
/// * `S_12 S_22 = S_22 S_12`: `det(S_22 S_11 − S_12 S_21)`
/// * `S_21 S_22 = S_22 S_21`: `det(S_11 S_22 − S_12 S_21)`
///
/// `S_22` may be singular; the identity extends to that case by continuity.
pub fn det_2x2_commuting_with(
    bm: &BlockMatrix,
    which: OffDiagonal,
    tol: &Tolerances,
) -> Result<ScaledDet> {
    require_block_count(bm, 2)?;
    let (s11, s12, s21, s22) = (
        bm.block(1, 1),
        bm.block(1, 2),
        bm.block(2, 1),
        bm.block(2, 2),
    );
    let combined = match which {
        OffDiagonal::S12 => {
            check_relation(s12, s22, false, tol)?;
            s22.matmul(s11)?.matsub(&s12.matmul(s21)?)?
        }
        OffDiagonal::S21 => {
            check_relation(s21, s22, false, tol)?;
            s11.matmul(s22)?.matsub(&s12.matmul(s21)?)?
        }
    };
    det_dense_with(&combined, tol)
}

pub fn det_2x2_anticommuting(bm: &BlockMatrix, which: OffDiagonal) -> Result<ScaledDet> {
    det_2x2_anticommuting_with(bm, which, &Tolerances::default())
}

/// Anti-commuting counterpart of [`det_2x2_commuting`]: the sign in front of
/// `S_12 S_21` flips to `+`. Unlike the commuting case this needs `S_22`
/// invertible (for 1×1 blocks, `d = 0, c ≠ 0` anticommute but the formula
/// gives `+bc` instead of `−bc`), so singular `S_22` is rejected.
pub fn det_2x2_anticommuting_with(
    bm: &BlockMatrix,
    which: OffDiagonal,
    tol: &Tolerances,
) -> Result<ScaledDet> {
    require_block_count(bm, 2)?;
    let (s11, s12, s21, s22) = (
        bm.block(1, 1),
        bm.block(1, 2),
        bm.block(2, 1),
        bm.block(2, 2),
    );
    if lu_decompose_with(s22, tol)?.is_singular() {
        return Err(BlockDetError::SingularMatrix);
    }
    let combined = match which {
        OffDiagonal::S12 => {
            check_relation(s12, s22, true, tol)?;
            s22.matmul(s11)?.matadd(&s12.matmul(s21)?)?
        }
        OffDiagonal::S21 => {
            check_relation(s21, s22, true, tol)?;
            s11.matmul(s22)?.matadd(&s12.matmul(s21)?)?
        }
    };
    det_dense_with(&combined, tol)
}

pub fn det_3x3_closed(bm: &BlockMatrix) -> Result<ScaledDet> {
    det_3x3_closed_with(bm, &Tolerances::default())
}

/// Three-factor closed form for `N = 3`:
///
/// ```text
/// det( [S11 − S13 S33⁻¹ S31] − [S12 − S13 S33⁻¹ S32][S22 − S23 S33⁻¹ S32]⁻¹[S21 − S23 S33⁻¹ S31] )
///   × det(S22 − S23 S33⁻¹ S32) × det(S33)
/// ```
pub fn det_3x3_closed_with(bm: &BlockMatrix, tol: &Tolerances) -> Result<ScaledDet> {
    require_block_count(bm, 3)?;
    let s = |i, j| bm.block(i, j);
    let s33_lu = lu_decompose_with(s(3, 3), tol)?;
    if s33_lu.is_singular() {
        return Err(BlockDetError::SingularMatrix);
    }
    let x31 = s33_lu.solve(s(3, 1))?;
    let x32 = s33_lu.solve(s(3, 2))?;
    let a11 = s(1, 1).matsub(&s(1, 3).matmul(&x31)?)?;
    let a12 = s(1, 2).matsub(&s(1, 3).matmul(&x32)?)?;
    let a21 = s(2, 1).matsub(&s(2, 3).matmul(&x31)?)?;
    let a22 = s(2, 2).matsub(&s(2, 3).matmul(&x32)?)?;

    let a22_lu = lu_decompose_with(&a22, tol)?;
    if a22_lu.is_singular() {
        return Err(BlockDetError::SingularPivotBlock { level: 1, index: 2 });
    }
    let top = a11.matsub(&a12.matmul(&a22_lu.solve(&a21)?)?)?;
    Ok(det_dense_with(&top, tol)? * a22_lu.determinant() * s33_lu.determinant())
}
