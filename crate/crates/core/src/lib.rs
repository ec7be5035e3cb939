//! Coherence, purity and correlation quantifiers for finite-dimensional
//! density matrices.
//!
//! The incoherent basis is the computational basis throughout and every
//! logarithm is base 2.

pub mod coherence;
pub mod correlations;
pub mod error;
pub mod linalg;
pub mod majorization;
pub mod purity;
pub mod states;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Dims, EigenSystem, RandomStream, Subsystem};
pub use states::{DensityMatrix, Spectrum};
