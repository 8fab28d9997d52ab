//! Exact arithmetic for the one-dimensional hinged-ruler folding problem.
//!
//! A ruler is a list of segment lengths in `[0, 1]`; a folding assigns each
//! segment a direction. The crate computes ranges and step-covers exactly,
//! builds the extremal lower-bound instances, runs the fringe-mass density
//! certificate for the upper bound, and searches heuristically for hard
//! instances.

pub mod distribution;
pub mod error;
pub mod extremal;
pub mod instance;
pub mod rational;
mod scaled;
pub mod search;
pub mod solvers;

pub use distribution::{
    certify_upper_bound, claim_check, fringe_mass, gamma_minus, gamma_plus, max_density,
    monte_carlo_walk, phi, pipeline, uniform_density, BoundCertificate, ClaimReport,
    PiecewiseConstantDensity,
};
pub use error::{Error, Result};
pub use extremal::{alternating_range, build_extremal, verify_lower_bound, ExtremalInstance, LowerBoundReport};
pub use instance::{
    evaluate_folding, merge_reduce, pad_with_zeros, reverse, FoldingEvaluation, RulerInstance, Sign,
    SignVector,
};
pub use rational::Rational;
pub use search::{fit_lower_bound_search, fit_monotonicity_check, FitEstimate, MonotonicityReport, SearchMethod};
pub use solvers::{
    branch_and_bound_step_cover, brute_force_step_cover, greedy_fold, SolverConfig, StepCoverResult,
};
