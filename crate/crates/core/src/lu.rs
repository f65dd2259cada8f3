//! LU factorization with partial pivoting, and the dense determinant oracle.

use crate::dense::{DenseMatrix, ONE, ZERO};
use crate::error::{BlockDetError, Result};
use crate::scaled::ScaledDet;
use crate::tolerance::Tolerances;

/// `P·A = L·U` with unit-diagonal `L` and `U` packed into one square matrix.
///
/// `perm[i]` is the row of `A` that ended up in row `i`.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: DenseMatrix,
    perm: Vec<usize>,
    parity: i8,
    singular: bool,
}

impl LuFactors {
    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    pub fn packed(&self) -> &DenseMatrix {
        &self.lu
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// `+1` for an even number of row swaps, `-1` for odd.
    pub fn parity(&self) -> i8 {
        self.parity
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn lower(&self) -> DenseMatrix {
        let n = self.dim();
        DenseMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Greater => self.lu.get(i, j),
            std::cmp::Ordering::Equal => ONE,
            std::cmp::Ordering::Less => ZERO,
        })
    }

    pub fn upper(&self) -> DenseMatrix {
        let n = self.dim();
        DenseMatrix::from_fn(n, n, |i, j| if i <= j { self.lu.get(i, j) } else { ZERO })
    }

    /// Permutation matrix `P` with `P·A = L·U`.
    pub fn permutation_matrix(&self) -> DenseMatrix {
        let n = self.dim();
        DenseMatrix::from_fn(n, n, |i, j| if self.perm[i] == j { ONE } else { ZERO })
    }

    /// Ratio of the largest to the smallest `|u_ii|`. A cheap lower bound on
    /// the condition number; infinite when a pivot is exactly zero.
    pub fn pivot_ratio(&self) -> f64 {
        let mags: Vec<f64> = (0..self.dim()).map(|i| self.lu.get(i, i).norm()).collect();
        let max = mags.iter().copied().fold(0.0, f64::max);
        let min = mags.iter().copied().fold(f64::INFINITY, f64::min);
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    /// `parity · ∏ u_ii`, exactly zero when the singular flag is set.
    pub fn determinant(&self) -> ScaledDet {
        if self.singular {
            return ScaledDet::ZERO;
        }
        self.pivot_product()
    }

    /// `parity · ∏ u_ii` ignoring the singular flag: the rounding-level value
    /// a near-singular matrix actually produced.
    pub fn pivot_product(&self) -> ScaledDet {
        let d: ScaledDet = (0..self.dim())
            .map(|i| ScaledDet::from_complex(self.lu.get(i, i)))
            .product();
        if self.parity < 0 {
            -d
        } else {
            d
        }
    }

    /// Solves `A·X = rhs` for every column of `rhs`.
    pub fn solve(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        let n = self.dim();
        if rhs.rows() != n {
            return Err(BlockDetError::DimensionMismatch(format!(
                "right-hand side has {} rows, system has {n}",
                rhs.rows()
            )));
        }
        if self.singular {
            return Err(BlockDetError::SingularMatrix);
        }
        let m = rhs.cols();
        let mut x = DenseMatrix::from_fn(n, m, |i, j| rhs.get(self.perm[i], j));
        // forward substitution with unit L
        for i in 0..n {
            for k in 0..i {
                let l = self.lu.get(i, k);
                if l == ZERO {
                    continue;
                }
                for j in 0..m {
                    let v = x.get(i, j) - l * x.get(k, j);
                    x.set(i, j, v);
                }
            }
        }
        // back substitution with U
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = self.lu.get(i, k);
                if u == ZERO {
                    continue;
                }
                for j in 0..m {
                    let v = x.get(i, j) - u * x.get(k, j);
                    x.set(i, j, v);
                }
            }
            let d = self.lu.get(i, i);
            for j in 0..m {
                x.set(i, j, x.get(i, j) / d);
            }
        }
        Ok(x)
    }
}

fn require_square(m: &DenseMatrix) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(BlockDetError::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )))
    }
}

pub fn lu_decompose(m: &DenseMatrix) -> Result<LuFactors> {
    lu_decompose_with(m, &Tolerances::default())
}

/// Doolittle elimination choosing the largest-modulus pivot in each column.
/// Singularity is reported through [`LuFactors::is_singular`], not as an error;
/// the only error is a non-square input.
pub fn lu_decompose_with(m: &DenseMatrix, tol: &Tolerances) -> Result<LuFactors> {
    require_square(m)?;
    let n = m.rows();
    let threshold = tol.pivot_threshold(m.max_abs(), n);
    let mut a = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut parity = 1i8;
    let mut singular = false;

    for k in 0..n {
        let (p, pmag) = (k..n)
            .map(|i| (i, a.get(i, k).norm()))
            .fold(
                (k, -1.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        if p != k {
            for j in 0..n {
                let tmp = a.get(k, j);
                a.set(k, j, a.get(p, j));
                a.set(p, j, tmp);
            }
            perm.swap(k, p);
            parity = -parity;
        }
        // an all-zero input has threshold 0, so a zero pivot must fail a strict `>`
        let usable = pmag > threshold;
        if !usable {
            singular = true;
        }
        if pmag == 0.0 {
            continue;
        }
        let pivot = a.get(k, k);
        for i in k + 1..n {
            let l = a.get(i, k) / pivot;
            a.set(i, k, l);
            if l == ZERO {
                continue;
            }
            for j in k + 1..n {
                let v = a.get(i, j) - l * a.get(k, j);
                a.set(i, j, v);
            }
        }
    }

    Ok(LuFactors {
        lu: a,
        perm,
        parity,
        singular,
    })
}

/// Determinant by LU. The oracle every block-structured result is checked against.
pub fn det_dense(m: &DenseMatrix) -> Result<ScaledDet> {
    det_dense_with(m, &Tolerances::default())
}

pub fn det_dense_with(m: &DenseMatrix, tol: &Tolerances) -> Result<ScaledDet> {
    Ok(lu_decompose_with(m, tol)?.determinant())
}

pub fn solve(m: &DenseMatrix, rhs: &DenseMatrix) -> Result<DenseMatrix> {
    solve_with(m, rhs, &Tolerances::default())
}

pub fn solve_with(m: &DenseMatrix, rhs: &DenseMatrix, tol: &Tolerances) -> Result<DenseMatrix> {
    lu_decompose_with(m, tol)?.solve(rhs)
}

pub fn invert(m: &DenseMatrix) -> Result<DenseMatrix> {
    invert_with(m, &Tolerances::default())
}

pub fn invert_with(m: &DenseMatrix, tol: &Tolerances) -> Result<DenseMatrix> {
    let lu = lu_decompose_with(m, tol)?;
    lu.solve(&DenseMatrix::identity(m.rows()))
}
