//! Perturbation experiments: eigenvalue Hölder checks, backward pairing of
//! Schur forms and forward-instability constructions.

pub mod backward;
pub mod forward;
pub mod holder;
pub mod matching;
pub mod report;
pub mod sampler;

pub use backward::{
    backward_reconstruct, measure_backward, safety_threshold, validate_decades, BackwardOptions, BackwardRecord, Reconstruction,
};
pub use forward::{forward_demo_perturb, forward_gap_lower_bound, ForwardBound, ForwardDemo};
pub use holder::{holder_ratio, holder_ratio_with, HolderRecord};
pub use matching::{match_eigenvalues, Matching};
pub use report::{fmt_float, holder_csv, DecadeSummary, ExperimentReport, HolderRow, TrialFailure};
pub use sampler::{ginibre, ginibre_with_norm, haar_unitary, rng_from_seed, trial_seed, well_conditioned};
