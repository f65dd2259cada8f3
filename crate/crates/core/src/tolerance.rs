//! Numerical thresholds shared by every operation.
//!
//! All entry points that need a threshold have a `*_with` variant taking a
//! [`Tolerances`]; the plain variants use [`Tolerances::default`].

/// Threshold configuration threaded through factorization and the block engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// A pivot `p` is singular when `|p| < pivot_relative * max|a_ij| * dim`.
    pub pivot_relative: f64,
    /// Commutator check: `‖XY - YX‖_max <= commutator_relative * max(‖XY‖_max, ‖YX‖_max)`.
    pub commutator_relative: f64,
}

pub const DEFAULT_PIVOT_RELATIVE: f64 = 1e-13;
pub const DEFAULT_COMMUTATOR_RELATIVE: f64 = 1e-10;

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            pivot_relative: DEFAULT_PIVOT_RELATIVE,
            commutator_relative: DEFAULT_COMMUTATOR_RELATIVE,
        }
    }
}

impl Tolerances {
    /// Absolute pivot threshold for a matrix of the given dimension and max entry magnitude.
    pub fn pivot_threshold(&self, max_abs: f64, dim: usize) -> f64 {
        self.pivot_relative * max_abs * dim as f64
    }
}
