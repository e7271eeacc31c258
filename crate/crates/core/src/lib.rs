//! Exact decomposition of affine Kähler curvature tensors.

pub mod document;
pub mod error;
pub mod hermitian;
pub mod linalg;
pub mod maps;
pub mod rational;
pub mod spaces;
pub mod tensor;
pub mod verify;
pub mod witness;

pub use error::{KdecError, Result};
