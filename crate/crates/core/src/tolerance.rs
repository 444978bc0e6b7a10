//! Numerical tolerances shared across the crate.

use serde::{Deserialize, Serialize};

/// One record holding every tolerance used for validation and verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Hermiticity / trace / norm checks on discrete states.
    pub normalization: f64,
    /// Eigenvalues in `[-eigen_clip, 0)` are clipped to zero; below is an error.
    pub eigen_clip: f64,
    /// Spectrum sum and range checks.
    pub validation: f64,
    /// Symmetry of covariance matrices.
    pub cm_symmetry: f64,
    /// Smallest admissible symplectic eigenvalue is `1 - bona_fide`.
    pub bona_fide: f64,
    /// Purity check used before one-to-rest identifications.
    pub purity: f64,
    /// The `pure` flag of a covariance-matrix validity report.
    pub pure_flag: f64,
    /// A relation fails only when its slack drops below `-violation`.
    pub violation: f64,
    /// Counterexample searches report witnesses only below `-witness`.
    pub witness: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        normalization: 1e-12,
        eigen_clip: 1e-10,
        validation: 1e-10,
        cm_symmetry: 1e-10,
        bona_fide: 1e-8,
        purity: 1e-8,
        pure_flag: 1e-6,
        violation: 1e-9,
        witness: 1e-6,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
