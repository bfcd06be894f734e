//! Numerical laboratory for Schur decompositions under small perturbation.
//!
//! Everything is generic over the real scalar `T: Real` (`f64` or `f32`) and
//! works on dense complex matrices measured in the operator 2-norm. The
//! aliases below fix `T = f64`.

pub mod eigen;
pub mod error;
pub mod gaps;
pub mod hessenberg;
pub mod io;
pub mod jordan;
pub mod lab;
pub mod linalg;
pub mod scalar;
pub mod schur;

pub use eigen::{eigenpairs, eigenspaces, eigenvalues, EigenPair, Eigenspace};
pub use error::{LabError, Result};
pub use gaps::{gap, intersect, kernel, kernel_semigap_ratio, orthocomplement, projector, semigap, KernelRatio, Projector, Subspace};
pub use hessenberg::{
    factor_unitary, hessenberg_from_first_column, hessenberg_from_params, HessenbergChain, SchurParams,
};
pub use io::{matrix_from_json, matrix_to_json, MatrixJson};
pub use jordan::{
    dual_sequence, gk_profile, gk_profile_default, jordan_basis_including, predict_deflation, weyr_nullities, Chain,
    GkProfile, JordanBasis,
};
pub use lab::{
    backward_reconstruct, forward_demo_perturb, forward_gap_lower_bound, holder_ratio, match_eigenvalues,
    measure_backward, BackwardOptions, ExperimentReport,
};
pub use linalg::*;
pub use scalar::{descending_modulus_order, Real};
pub use schur::{schur_decompose, schur_with_first_vector, verify_schur, EigenOrder, SchurForm};

pub type C64 = num_complex::Complex<f64>;
pub type C32 = num_complex::Complex<f32>;
pub type CMatrix = ComplexMatrix<f64>;
pub type CMatrix32 = ComplexMatrix<f32>;
pub type Schur = SchurForm<f64>;
pub type Space = Subspace<f64>;
pub type Profile = GkProfile<f64>;
