//! Numerical differential geometry on coordinate charts.

pub mod conformal_einstein;
pub mod error;
pub mod gray_hervella;
pub mod jets;
pub mod metric_builders;
pub mod special_holonomy;
pub mod tensor_core;

pub use error::{GeomError, Result};
pub use jets::{Jet2, JetMat};
