//! Non-Hermitian tight-binding networks with latent symmetry.
//!
//! The crate builds around a minimal three-site network in which two sites
//! are cospectral: their vertex-deleted subgraphs share a characteristic
//! polynomial. That hidden (latent) symmetry splits the dynamics into a
//! one-dimensional dark sector that never populates the third site and a
//! two-dimensional bright sector that reduces to an effective dimer. For a
//! suitable choice of onsite energies the bright dimer is PT-symmetric,
//! with a real-eigenvalue window bounded by second-order exceptional
//! points.
//!
//! Modules:
//! - [`numerics`]: dense complex matrices, characteristic polynomials,
//!   root finding, eigendecomposition with defectiveness detection, and a
//!   matrix exponential that stays accurate on defective matrices.
//! - [`network`]: general tight-binding Hamiltonians, vertex deletion,
//!   cospectrality tests, singlet-site identification.
//! - [`trimer`]: the parametrized trimer with closed-form dark/bright
//!   decomposition, phase classification, and exact occupation formulas.
//! - [`dynamics`]: propagator-based time evolution and trajectories.
//! - [`sweep`]: parameter sweeps and exceptional-point location.

pub mod dynamics;
pub mod error;
pub mod network;
pub mod numerics;
pub mod sweep;
pub mod trimer;

pub use error::{Error, Result};
pub use num_complex::Complex64;
