//! Finite-dimensional presheaf and sheaf truth values for quantum systems.
//!
//! The numeric layer is generic over [`Scalar`] (f64 or f32); everything
//! above the context poset is combinatorial. The aliases below fix f64.

pub mod contexts;
pub mod error;
pub mod fixtures;
pub mod linops;
pub mod presheaves;
pub mod scalar;
pub mod site;
pub mod spectral;
pub mod translate;
pub mod truth;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type CMatrix = linops::ComplexMatrix<f64>;
pub type CMatrix32 = linops::ComplexMatrix<f32>;
pub type Density = linops::DensityMatrix<f64>;
pub type Proj = linops::Projection<f64>;
pub type Poset = contexts::ContextPoset<f64>;
pub type Poset32 = contexts::ContextPoset<f32>;
pub type Truth = truth::TruthObject<f64>;
