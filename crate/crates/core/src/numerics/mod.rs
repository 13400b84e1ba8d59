//! Minimal dense complex linear algebra: characteristic polynomials by the
//! Faddeev-LeVerrier recurrence, polynomial root finding, eigendecomposition
//! with defectiveness detection, and a matrix exponential that remains valid
//! for defective (Jordan-block) matrices.
//!
//! Everything here is a pure function of its inputs and safe to call
//! concurrently.

mod eigen;
mod expm;
mod matrix;
mod poly;

pub use eigen::{eigen, SpectralDecomposition, CLUSTER_RELATIVE_TOL, CONDITION_CAP};
pub use expm::expm;
pub use matrix::ComplexMatrix;
pub use poly::{char_poly, poly_roots, principal_sqrt, Polynomial, DEFAULT_ROOT_TOL};

/// Default tolerance for equality of complex scalars.
pub const DEFAULT_TOL: f64 = 1e-10;
