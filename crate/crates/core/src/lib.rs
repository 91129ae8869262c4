//! Numerical laboratory for Foguel operators `R_T = [[V*, T], [0, V]]` on
//! finite-dimensional complex spaces.
//!
//! The modules mirror the identities being checked:
//!
//! * [`kernel`]: Hermitian eigendecomposition, operator norm, PSD square
//!   root, inverses and multiset comparison.
//! * [`models`]: seeded Haar unitaries, contractions, truncated shifts and
//!   the [`FoguelOperator`](models::FoguelOperator) type.
//! * [`spectral`]: spectral mapping between `R_T R_T*` and `TT*`, the closed
//!   norm formula, explicit resolvent and inverse blocks.
//! * [`dilation`]: unitary dilation of contractions, compression bound and
//!   the polynomial calculus of `[[A*, T], [0, A]]`.
//! * [`schur`]: Schur-complement positivity and the bisection norm solver.
//! * [`experiment`]: seeded trial batches and their json-lines / csv reports.
//!
//! Everything is generic over the real scalar `T: Real` (`f32` or `f64`);
//! the aliases below fix `f64`, which is what the experiments use.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dilation;
pub mod error;
pub mod experiment;
pub mod kernel;
pub mod models;
pub mod scalar;
pub mod schur;
pub mod spectral;

pub use error::{Error, Result};
pub use kernel::Tolerance;
pub use models::SeededGenerator;
pub use scalar::{CMatrix, Real};

/// Dense complex matrix over `f64`.
pub type ComplexMatrix = CMatrix<f64>;
pub type ComplexMatrix32 = CMatrix<f32>;
pub type FoguelOperator = models::FoguelOperator<f64>;
pub type FoguelOperator32 = models::FoguelOperator<f32>;
pub type ResolventBlocks = spectral::ResolventBlocks<f64>;
pub type SpectralMapReport = spectral::SpectralMapReport<f64>;
pub type Polynomial = dilation::Polynomial<f64>;
pub type DilationLift = dilation::DilationLift<f64>;
pub type PositivityCertificate = schur::PositivityCertificate<f64>;
