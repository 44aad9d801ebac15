//! Sampling-pattern design.
//!
//! The objective scores a vertex subset `X` through the Gram matrix of the
//! model rows it selects, `G(X) = sum_{(i, j) in X x X} psi_ij psi_ij^T`.
//! [`greedy_design`] grows `X` one vertex at a time, [`brute_force_design`]
//! enumerates every subset for small instances, and [`random_design`] is the
//! unstructured baseline.

mod baselines;
mod greedy;
mod objective;
mod submodularity;

pub use baselines::{binomial, brute_force_design, random_design, BRUTE_FORCE_LIMIT};
pub use greedy::{cholesky_rank_one_update, greedy_design, GreedyState, GreedyTrace};
pub use objective::{objective_value, DesignObjective, ObjectiveKind};
pub use submodularity::{
    check_submodularity, check_submodularity_exhaustive, SubmodularityReport, MAX_CHECK_VERTICES, SLACK,
};
