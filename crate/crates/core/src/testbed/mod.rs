//! Test objectives, candidate sets, the noisy oracle and initial designs.

pub mod candidates;
pub mod objectives;
pub mod oracle;

pub use candidates::{halton_point, make_candidates};
pub use objectives::{
    make_objective, objective_by_id, ClosedForm, EvaluationRule, ObjectiveSpec, TabulatedFunction,
};
pub use oracle::{
    evaluate, initial_design, sample_prior_function, sample_prior_function_with, NoisyOracle,
};
