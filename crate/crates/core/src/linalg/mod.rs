//! Exact scalars, dense matrices and monomial bases.

pub mod echelon;
pub mod matrix;
pub mod monomial;
pub mod scalar;
pub mod sparse;

pub use echelon::Echelon;
pub use matrix::{mat_kernel_basis, mat_rank, solve_in_image, Matrix, Solve, Vector};
pub use monomial::{binomial, monomial_basis, sym_dim, BasisKind, MonomialBasis};
pub use scalar::{Field, Scalar};
pub use sparse::{SparseEchelon, SparseVec};
