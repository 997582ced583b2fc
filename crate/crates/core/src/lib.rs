//! Batch Bayesian optimization on finite candidate sets.
//!
//! The centerpiece is the TS-RSR acquisition rule: each batch slot picks the
//! candidate minimizing the ratio between a Thompson-sampled regret
//! `f̃* − μ_t(x)` and the posterior standard deviation conditioned on the
//! slots already chosen in the batch. Baseline batch rules, synthetic test
//! objectives, regret diagnostics and a seeded experiment runner
//! are included.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acquisition;
pub mod bench;
pub mod diagnostics;
pub mod error;
pub mod gp;
pub mod linalg;
pub mod seeds;
pub mod testbed;

pub use error::{Error, Result};
