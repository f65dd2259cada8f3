//! Uniformly partitioned block matrices and the 2×2 Schur-complement primitives.
//!
//! Block indices in this module's public API are 1-based: `block(1, 1)` is the
//! top-left block `S_11` and `block(N, N)` the bottom-right one.

use crate::dense::DenseMatrix;
use crate::error::{BlockDetError, Result};
use crate::lu::{lu_decompose_with, LuFactors};
use crate::tolerance::Tolerances;

/// An `(N·n) × (N·n)` matrix viewed as an `N × N` grid of `n × n` blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    block_count: usize,
    block_size: usize,
    /// Row-major over block positions.
    blocks: Vec<DenseMatrix>,
}

impl BlockMatrix {
    /// Builds from a row-major grid of `N²` blocks, each `n × n`.
    pub fn from_blocks(block_count: usize, blocks: Vec<DenseMatrix>) -> Result<Self> {
        if block_count == 0 || blocks.len() != block_count * block_count {
            return Err(BlockDetError::DimensionMismatch(format!(
                "{block_count}x{block_count} block grid needs {} blocks, got {}",
                block_count * block_count,
                blocks.len()
            )));
        }
        let n = blocks[0].rows();
        if let Some(pos) = blocks.iter().position(|b| b.rows() != n || b.cols() != n) {
            let b = &blocks[pos];
            return Err(BlockDetError::DimensionMismatch(format!(
                "block ({}, {}) is {}x{}, expected {n}x{n}",
                pos / block_count + 1,
                pos % block_count + 1,
                b.rows(),
                b.cols()
            )));
        }
        Ok(Self {
            block_count,
            block_size: n,
            blocks,
        })
    }

    /// Builds from a closure over 1-based block indices.
    pub fn from_fn(
        block_count: usize,
        block_size: usize,
        mut f: impl FnMut(usize, usize) -> DenseMatrix,
    ) -> Result<Self> {
        let mut blocks = Vec::with_capacity(block_count * block_count);
        for i in 1..=block_count {
            for j in 1..=block_count {
                blocks.push(f(i, j));
            }
        }
        let bm = Self::from_blocks(block_count, blocks)?;
        if bm.block_size != block_size {
            return Err(BlockDetError::DimensionMismatch(format!(
                "blocks are {0}x{0}, expected {block_size}x{block_size}",
                bm.block_size
            )));
        }
        Ok(bm)
    }

    /// The `N`-fold block diagonal with the given diagonal blocks.
    pub fn block_diagonal(diag: &[DenseMatrix]) -> Result<Self> {
        let n = diag.first().map_or(0, DenseMatrix::rows);
        Self::from_fn(diag.len(), n, |i, j| {
            if i == j {
                diag[i - 1].clone()
            } else {
                DenseMatrix::zeros(n, n)
            }
        })
    }

    pub fn block_count(&self) -> usize {
        self.block_count
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    /// Full dimension `N·n`.
    pub fn dim(&self) -> usize {
        self.block_count * self.block_size
    }

    /// `S_ij`, 1-based. Panics when out of range; see [`BlockMatrix::try_block`].
    pub fn block(&self, i: usize, j: usize) -> &DenseMatrix {
        self.try_block(i, j).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn try_block(&self, i: usize, j: usize) -> Result<&DenseMatrix> {
        self.check_index(i, j)?;
        Ok(&self.blocks[(i - 1) * self.block_count + (j - 1)])
    }

    pub fn blocks(&self) -> &[DenseMatrix] {
        &self.blocks
    }

    fn check_index(&self, i: usize, j: usize) -> Result<()> {
        let n = self.block_count;
        if (1..=n).contains(&i) && (1..=n).contains(&j) {
            Ok(())
        } else {
            Err(BlockDetError::IndexOutOfRange(format!(
                "block ({i}, {j}) of a {n}x{n} block matrix"
            )))
        }
    }

    /// Block column `s_ij = (S_ij, S_{i+1,j}, …, S_Nj)ᵀ`.
    pub fn column_vector(&self, i: usize, j: usize) -> Result<BlockVectorColumn> {
        self.check_index(i, j)?;
        let blocks = (i..=self.block_count)
            .map(|r| self.block(r, j).clone())
            .collect();
        Ok(BlockVectorColumn {
            origin: (i, j),
            blocks,
        })
    }

    /// Block row `σᵀ_ij = (S_ij, S_{i,j+1}, …, S_iN)`.
    pub fn row_vector(&self, i: usize, j: usize) -> Result<BlockVectorRow> {
        self.check_index(i, j)?;
        let blocks = (j..=self.block_count)
            .map(|c| self.block(i, c).clone())
            .collect();
        Ok(BlockVectorRow {
            origin: (i, j),
            blocks,
        })
    }

    /// The square sub-grid of blocks `first..=last` in both directions (1-based).
    pub(crate) fn sub_grid(&self, first: usize, last: usize) -> BlockMatrix {
        debug_assert!(1 <= first && first <= last && last <= self.block_count);
        let count = last - first + 1;
        let mut blocks = Vec::with_capacity(count * count);
        for i in first..=last {
            for j in first..=last {
                blocks.push(self.block(i, j).clone());
            }
        }
        BlockMatrix {
            block_count: count,
            block_size: self.block_size,
            blocks,
        }
    }

    /// Applies the same permutation to block rows and block columns:
    /// block `(i, j)` of the result is block `(perm[i-1], perm[j-1])` of `self`.
    pub fn permute_blocks(&self, perm: &[usize]) -> Result<BlockMatrix> {
        let n = self.block_count;
        let mut seen = vec![false; n];
        if perm.len() != n
            || perm
                .iter()
                .any(|&p| p == 0 || p > n || std::mem::replace(&mut seen[p - 1], true))
        {
            return Err(BlockDetError::IndexOutOfRange(format!(
                "{perm:?} is not a permutation of 1..={n}"
            )));
        }
        Self::from_fn(n, self.block_size, |i, j| {
            self.block(perm[i - 1], perm[j - 1]).clone()
        })
    }
}

/// `s_ij`: blocks `(i..=N, j)` stacked vertically.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockVectorColumn {
    pub origin: (usize, usize),
    pub blocks: Vec<DenseMatrix>,
}

/// `σᵀ_ij`: blocks `(i, j..=N)` laid out horizontally.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockVectorRow {
    pub origin: (usize, usize),
    pub blocks: Vec<DenseMatrix>,
}

impl BlockVectorColumn {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// `(len·n) × n` dense matrix.
    pub fn to_dense(&self) -> Result<DenseMatrix> {
        DenseMatrix::vstack(&self.blocks.iter().collect::<Vec<_>>())
    }
}

impl BlockVectorRow {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// `n × (len·n)` dense matrix.
    pub fn to_dense(&self) -> Result<DenseMatrix> {
        DenseMatrix::hstack(&self.blocks.iter().collect::<Vec<_>>())
    }
}

/// Splits a square `m` of dimension `block_count · block_size` into blocks.
pub fn partition(m: &DenseMatrix, block_count: usize, block_size: usize) -> Result<BlockMatrix> {
    if block_count == 0 || block_size == 0 || !m.is_square() || m.rows() != block_count * block_size
    {
        return Err(BlockDetError::DimensionMismatch(format!(
            "cannot partition a {}x{} matrix into {block_count}x{block_count} blocks of size {block_size}",
            m.rows(),
            m.cols()
        )));
    }
    let n = block_size;
    let mut blocks = Vec::with_capacity(block_count * block_count);
    for bi in 0..block_count {
        for bj in 0..block_count {
            blocks.push(m.submatrix(bi * n, bj * n, n, n)?);
        }
    }
    Ok(BlockMatrix {
        block_count,
        block_size,
        blocks,
    })
}

/// Reassembles the dense matrix; exact inverse of [`partition`].
pub fn flatten(bm: &BlockMatrix) -> DenseMatrix {
    let n = bm.block_size;
    let mut out = DenseMatrix::zeros(bm.dim(), bm.dim());
    for i in 1..=bm.block_count {
        for j in 1..=bm.block_count {
            out.paste((i - 1) * n, (j - 1) * n, bm.block(i, j));
        }
    }
    out
}

/// `S̃_k`: the `k × k` block matrix in the lower-right corner.
pub fn trailing_submatrix(bm: &BlockMatrix, k: usize) -> Result<BlockMatrix> {
    let n = bm.block_count;
    if !(1..=n).contains(&k) {
        return Err(BlockDetError::IndexOutOfRange(format!(
            "trailing submatrix of size {k} in a {n}x{n} block matrix"
        )));
    }
    Ok(bm.sub_grid(n - k + 1, n))
}

/// Assembles `[[a, b], [c, d]]` with possibly unequal diagonal block sizes.
pub fn assemble_2x2(
    a: &DenseMatrix,
    b: &DenseMatrix,
    c: &DenseMatrix,
    d: &DenseMatrix,
) -> Result<DenseMatrix> {
    check_conformable(a, b, c, d)?;
    let top = DenseMatrix::hstack(&[a, b])?;
    let bottom = DenseMatrix::hstack(&[c, d])?;
    DenseMatrix::vstack(&[&top, &bottom])
}

fn check_conformable(
    a: &DenseMatrix,
    b: &DenseMatrix,
    c: &DenseMatrix,
    d: &DenseMatrix,
) -> Result<()> {
    let (k, m) = (a.rows(), d.rows());
    let ok = a.is_square()
        && d.is_square()
        && (b.rows(), b.cols()) == (k, m)
        && (c.rows(), c.cols()) == (m, k);
    if ok {
        Ok(())
    } else {
        Err(BlockDetError::DimensionMismatch(format!(
            "blocks not conformable: a {}x{}, b {}x{}, c {}x{}, d {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols(),
            c.rows(),
            c.cols(),
            d.rows(),
            d.cols()
        )))
    }
}

fn factor_nonsingular(m: &DenseMatrix, tol: &Tolerances) -> Result<LuFactors> {
    let lu = lu_decompose_with(m, tol)?;
    if lu.is_singular() {
        Err(BlockDetError::SingularMatrix)
    } else {
        Ok(lu)
    }
}

/// `A − B·D⁻¹·C`, with `D⁻¹·C` obtained by a linear solve.
pub fn schur_complement_2x2(
    a: &DenseMatrix,
    b: &DenseMatrix,
    c: &DenseMatrix,
    d: &DenseMatrix,
) -> Result<DenseMatrix> {
    schur_complement_2x2_with(a, b, c, d, &Tolerances::default())
}

pub fn schur_complement_2x2_with(
    a: &DenseMatrix,
    b: &DenseMatrix,
    c: &DenseMatrix,
    d: &DenseMatrix,
    tol: &Tolerances,
) -> Result<DenseMatrix> {
    check_conformable(a, b, c, d)?;
    let d_lu = factor_nonsingular(d, tol)?;
    let d_inv_c = d_lu.solve(c)?;
    a.matsub(&b.matmul(&d_inv_c)?)
}

/// The four blocks of a 2×2-partitioned inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockInverse2x2 {
    pub top_left: DenseMatrix,
    pub top_right: DenseMatrix,
    pub bottom_left: DenseMatrix,
    pub bottom_right: DenseMatrix,
}

impl BlockInverse2x2 {
    pub fn assemble(&self) -> Result<DenseMatrix> {
        assemble_2x2(
            &self.top_left,
            &self.top_right,
            &self.bottom_left,
            &self.bottom_right,
        )
    }
}

pub fn banachiewicz_inverse(
    a: &DenseMatrix,
    b: &DenseMatrix,
    c: &DenseMatrix,
    d: &DenseMatrix,
) -> Result<BlockInverse2x2> {
    banachiewicz_inverse_with(a, b, c, d, &Tolerances::default())
}

/// Blockwise inverse of `[[A, B], [C, D]]` through the Schur complement
/// `Σ = A − B·D⁻¹·C`:
///
/// ```text
/// [ Σ⁻¹           −Σ⁻¹·B·D⁻¹            ]
/// [ −D⁻¹·C·Σ⁻¹    D⁻¹·(I + C·Σ⁻¹·B·D⁻¹) ]
/// ```
pub fn banachiewicz_inverse_with(
    a: &DenseMatrix,
    b: &DenseMatrix,
    c: &DenseMatrix,
    d: &DenseMatrix,
    tol: &Tolerances,
) -> Result<BlockInverse2x2> {
    check_conformable(a, b, c, d)?;
    let d_lu = factor_nonsingular(d, tol)?;
    let d_inv = d_lu.solve(&DenseMatrix::identity(d.rows()))?;
    let schur = a.matsub(&b.matmul(&d_inv.matmul(c)?)?)?;
    let schur_inv = factor_nonsingular(&schur, tol)?.solve(&DenseMatrix::identity(a.rows()))?;

    let b_dinv = b.matmul(&d_inv)?;
    let dinv_c = d_inv.matmul(c)?;
    let top_right = schur_inv.matmul(&b_dinv)?.neg();
    let bottom_left = dinv_c.matmul(&schur_inv)?.neg();
    let correction = c.matmul(&schur_inv)?.matmul(&b_dinv)?;
    let bottom_right = d_inv.matmul(&DenseMatrix::identity(d.rows()).matadd(&correction)?)?;

    Ok(BlockInverse2x2 {
        top_left: schur_inv,
        top_right,
        bottom_left,
        bottom_right,
    })
}
