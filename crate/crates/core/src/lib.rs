//! Entanglement witnesses for two qutrits built from the Gell-Mann basis.
//!
//! The crate covers the operator basis, product-state optimization, the
//! feasible region of Gell-Mann expectation values, witness classification
//! and the symmetry group acting on witnesses.

pub mod error;
pub mod feasible;
pub mod linalg;
pub mod operators;
pub mod optimize;
pub mod states;
pub mod su3;
pub mod symmetry;

pub use error::{Error, Result};
pub use linalg::CMat;
pub use operators::{classify, ClassificationReport, ClassifyOptions, OperatorLabel, Verdict, WitnessCoeffs};
pub use optimize::OptimizerConfig;
pub use states::{DensityOp, ProductState};
