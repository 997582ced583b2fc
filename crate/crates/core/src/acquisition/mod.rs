//! Batch-proposal strategies over a finite candidate set.
//!
//! TS-RSR picks each slot by minimizing the ratio of a Thompson-sampled
//! regret estimate to the batch-conditional posterior σ. The baselines are
//! batch Thompson sampling, BUCB, UCBPE, sequential kriging-believer EI and
//! a Boltzmann stochastic policy over EI, plus greedy max-variance picks
//! for warm-up exploration.

pub mod config;
pub mod strategies;

pub use config::{beta_schedule, AcquisitionConfig, LiarStrategy, Strategy};
pub use strategies::{
    expected_improvement, propose, propose_bucb, propose_maxvar, propose_qei, propose_sp,
    propose_ts, propose_tsrsr, propose_tsrsr_with, propose_ucbpe, rsr_value, sp_probabilities,
    BatchProposal, ProposalContext, SlotDiagnostics,
};
