//! Seeded generators for test corpora and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::block::BlockMatrix;
use crate::dense::{DenseMatrix, C64};

/// Seed used by the CLI and the acceptance corpus unless overridden.
pub const DEFAULT_SEED: u64 = 0x5EED_B10C;

pub struct MatrixRng {
    rng: ChaCha8Rng,
}

impl MatrixRng {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    pub fn index(&mut self, upper: usize) -> usize {
        self.rng.gen_range(0..upper)
    }

    /// Uniform in the complex square `|re|, |im| <= 1`.
    pub fn complex(&mut self) -> C64 {
        C64::new(
            self.rng.gen_range(-1.0..=1.0),
            self.rng.gen_range(-1.0..=1.0),
        )
    }

    pub fn unit_square(&mut self, rows: usize, cols: usize) -> DenseMatrix {
        DenseMatrix::from_fn(rows, cols, |_, _| self.complex())
    }

    pub fn block_matrix(&mut self, block_count: usize, block_size: usize) -> BlockMatrix {
        BlockMatrix::from_fn(block_count, block_size, |_, _| {
            self.unit_square(block_size, block_size)
        })
        .expect("uniform blocks")
    }

    /// `c0·I + c1·X + c2·X²` with random complex coefficients.
    pub fn quadratic_in(&mut self, x: &DenseMatrix) -> DenseMatrix {
        let n = x.rows();
        let x2 = x.matmul(x).expect("square");
        let (c0, c1, c2) = (self.complex(), self.complex(), self.complex());
        DenseMatrix::identity(n)
            .scalar_mul(c0)
            .matadd(&x.scalar_mul(c1))
            .and_then(|m| m.matadd(&x2.scalar_mul(c2)))
            .expect("conformable")
    }

    /// Uniformly random permutation of `1..=n`.
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (1..=n).collect();
        for i in (1..n).rev() {
            let j = self.rng.gen_range(0..=i);
            p.swap(i, j);
        }
        p
    }
}
