//! Dense linear algebra kernels, generic over [`Real`](crate::Real).

mod general;
mod lu;
mod sparse;
mod symmetric;

pub use general::{general_eigen, GeneralEigen};
pub use lu::{complex_inverse, one_norm};
pub use sparse::SparseMatrix;
pub use symmetric::{symmetric_eigen, SymmetricEigen};
