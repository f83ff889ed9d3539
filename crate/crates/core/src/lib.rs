//! Numerical laboratory for the least singular value of genuinely complex
//! random matrices.
//!
//! The crate covers the computable objects that show up in small-ball
//! arguments for complex random matrices:
//!
//! * [`ensembles`]: seeded sampling of scalar laws and (shifted) random matrices,
//! * [`realify`]: the real embedding `v̂` and the 2×2n bracket matrix `[v]`,
//! * [`vector_geometry`]: sparse / compressible / incompressible classification
//!   and spread sets,
//! * [`lcd`]: the essential least common denominator (real and complex),
//!   the constants behind the incompressible lower bound, and level-set nets,
//! * [`smallball`]: Lévy concentration estimates (exact and Monte Carlo),
//! * [`spectra`]: eigenvalues, real Schur counting, singular values and
//!   distance computations,
//! * [`experiments`]: reproducible Monte Carlo / enumeration experiments with
//!   CSV and JSON output.

pub mod ensembles;
pub mod error;
pub mod experiments;
pub mod lcd;
pub mod matrix_file;
pub mod realify;
pub mod rng;
pub mod smallball;
pub mod spectra;
pub mod stats;
pub mod vector_geometry;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Dense column-major complex matrix.
pub type ComplexMatrix = nalgebra::DMatrix<Complex64>;
/// Dense real matrix.
pub type RealMatrix = nalgebra::DMatrix<f64>;
/// Dense complex column vector.
pub type ComplexVector = nalgebra::DVector<Complex64>;
