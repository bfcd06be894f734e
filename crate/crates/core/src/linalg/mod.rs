//! Dense complex linear algebra used by every other module.

pub mod basis;
pub mod lu;
pub mod matrix;
pub mod svd;

pub use basis::{gram_schmidt, orthonormal_extend, orthonormality_defect};
pub use lu::{inverse, Lu};
pub use matrix::{dot, normalized, unit_vector, vec_norm, vec_sub, ComplexMatrix};
pub use svd::{
    null_space, operator_norm, range_space, rank_with_tol, singular_values, svd, SvdResult,
    DEFAULT_RANK_TOL, MAX_SWEEPS,
};
