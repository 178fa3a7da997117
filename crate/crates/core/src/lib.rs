//! Exact bitwise MAP inference for non-adaptive group testing.
//!
//! Objects carry independent Bernoulli priors; each test reports the
//! OR of its members' states. After conditioning on an observation,
//! every object in a negative test is certainly negative, and the
//! survivors form a reduced problem over n objects and m positive
//! tests ([`graph::reduce`]).
//!
//! On the reduced problem the unnormalized posterior values a^(b)(ℓ)
//! can be computed three ways:
//!
//! * [`oracle::naive_posterior_value`] — direct sum over 2^n object
//!   states, the ground truth;
//! * [`oracle::finer_posterior_value`] — the same sum refactored over
//!   per-edge variables tied by equality factors;
//! * [`dual::dual_posterior_value`] — a signed sum of 2^m terms over
//!   test-side variables, built from per-object Δ factors, with an
//!   all-objects O(n·2^m) fast path
//!   ([`dual::dual_all_posteriors_fast`]).
//!
//! The dual route rests on local identities of a 2×2 transform pair;
//! [`holo`] verifies each of them numerically. [`report`] turns
//! posterior values into per-object MAP decisions; [`formats`] holds
//! the JSON file shapes.

pub mod dual;
pub mod error;
pub mod formats;
pub mod graph;
pub mod holo;
pub mod model;
pub mod oracle;
pub mod report;
pub mod sum;

pub use dual::{DualOptions, DualWorkspace};
pub use error::{Error, Result};
pub use graph::{build_pooling_graph, random_pooling_graph, reduce, PoolingGraph, ReducedProblem};
pub use model::{run_tests, sample_states, Observation, PriorVector, StateVector};
pub use oracle::OracleOptions;
pub use report::{
    posterior_report, LogRatio, Method, ObjectPosterior, ObjectStatus, PosteriorReport,
};
pub use sum::NeumaierSum;
