//! Dense and sparse linear algebra used by every physics module.

pub mod eigen;
mod matrix;
mod sparse;

pub use matrix::{inner, HermitianEigen, OperatorMatrix};
pub use sparse::CsrMatrix;
