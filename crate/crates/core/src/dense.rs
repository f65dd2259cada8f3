//! Row-major complex dense matrices.

use std::fmt;

use num_complex::Complex64;

use crate::error::{BlockDetError, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Rectangular complex matrix with row-major storage.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl DenseMatrix {
    /// Checked constructor: `entries.len() == rows * cols`, both dimensions
    /// positive, every entry finite.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(BlockDetError::DimensionMismatch(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(BlockDetError::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(pos) = entries
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(BlockDetError::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self {
            rows,
            cols,
            data: entries,
        })
    }

    pub(crate) fn from_vec_unchecked(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(BlockDetError::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    /// Convenience for real-valued fixtures.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            entries.iter().map(|&x| C64::new(x, 0.0)).collect(),
        )
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_vec_unchecked(rows, cols, vec![ZERO; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_vec_unchecked(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn into_entries(self) -> Vec<C64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Largest entry modulus, `‖A‖_max`.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Copy of rows `r0..r0+nr`, columns `c0..c0+nc`.
    pub fn submatrix(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Result<Self> {
        if nr == 0 || nc == 0 || r0 + nr > self.rows || c0 + nc > self.cols {
            return Err(BlockDetError::IndexOutOfRange(format!(
                "submatrix [{r0}+{nr}, {c0}+{nc}] of {}x{}",
                self.rows, self.cols
            )));
        }
        let mut data = Vec::with_capacity(nr * nc);
        for i in r0..r0 + nr {
            data.extend_from_slice(&self.data[i * self.cols + c0..i * self.cols + c0 + nc]);
        }
        Ok(Self::from_vec_unchecked(nr, nc, data))
    }

    /// Writes `src` with its top-left corner at `(r0, c0)`.
    pub(crate) fn paste(&mut self, r0: usize, c0: usize, src: &DenseMatrix) {
        debug_assert!(r0 + src.rows <= self.rows && c0 + src.cols <= self.cols);
        for i in 0..src.rows {
            let dst = (r0 + i) * self.cols + c0;
            self.data[dst..dst + src.cols].copy_from_slice(src.row(i));
        }
    }

    /// Stacks matrices with equal column counts top to bottom.
    pub fn vstack(parts: &[&DenseMatrix]) -> Result<Self> {
        let cols = parts
            .first()
            .ok_or_else(|| BlockDetError::DimensionMismatch("empty vstack".into()))?
            .cols;
        if parts.iter().any(|p| p.cols != cols) {
            return Err(BlockDetError::DimensionMismatch(
                "vstack parts differ in column count".into(),
            ));
        }
        let rows = parts.iter().map(|p| p.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for p in parts {
            data.extend_from_slice(&p.data);
        }
        Ok(Self::from_vec_unchecked(rows, cols, data))
    }

    /// Concatenates matrices with equal row counts left to right.
    pub fn hstack(parts: &[&DenseMatrix]) -> Result<Self> {
        let rows = parts
            .first()
            .ok_or_else(|| BlockDetError::DimensionMismatch("empty hstack".into()))?
            .rows;
        if parts.iter().any(|p| p.rows != rows) {
            return Err(BlockDetError::DimensionMismatch(
                "hstack parts differ in row count".into(),
            ));
        }
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut c0 = 0;
        for p in parts {
            out.paste(0, c0, p);
            c0 += p.cols;
        }
        Ok(out)
    }

    pub fn matmul(&self, rhs: &DenseMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(BlockDetError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = vec![ZERO; self.rows * rhs.cols];
        for i in 0..self.rows {
            let out_row = &mut out[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(Self::from_vec_unchecked(self.rows, rhs.cols, out))
    }

    fn zip_with(&self, rhs: &DenseMatrix, op: &str, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(BlockDetError::DimensionMismatch(format!(
                "cannot {op} {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self::from_vec_unchecked(self.rows, self.cols, data))
    }

    pub fn matadd(&self, rhs: &DenseMatrix) -> Result<Self> {
        self.zip_with(rhs, "add", |a, b| a + b)
    }

    pub fn matsub(&self, rhs: &DenseMatrix) -> Result<Self> {
        self.zip_with(rhs, "subtract", |a, b| a - b)
    }

    pub fn scalar_mul(&self, s: C64) -> Self {
        Self::from_vec_unchecked(
            self.rows,
            self.cols,
            self.data.iter().map(|&z| z * s).collect(),
        )
    }

    pub fn neg(&self) -> Self {
        self.scalar_mul(-ONE)
    }

    /// Kronecker product `self ⊗ rhs`; the left factor's index is outermost.
    pub fn kron(&self, rhs: &DenseMatrix) -> Self {
        let (r, c) = (self.rows * rhs.rows, self.cols * rhs.cols);
        Self::from_fn(r, c, |i, j| {
            self.get(i / rhs.rows, j / rhs.cols) * rhs.get(i % rhs.rows, j % rhs.cols)
        })
    }

    /// `XY - YX`.
    pub fn commutator(&self, rhs: &DenseMatrix) -> Result<Self> {
        self.matmul(rhs)?.matsub(&rhs.matmul(self)?)
    }

    /// `XY + YX`.
    pub fn anticommutator(&self, rhs: &DenseMatrix) -> Result<Self> {
        self.matmul(rhs)?.matadd(&rhs.matmul(self)?)
    }

    /// `‖self - rhs‖_max`; panics on shape mismatch (test helper semantics).
    pub fn max_abs_diff(&self, rhs: &DenseMatrix) -> f64 {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "shape mismatch"
        );
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}
