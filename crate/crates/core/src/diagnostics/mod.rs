//! Regret accounting, information gain, ρ_m estimation, regret-to-sigma
//! bound audits and Monte-Carlo checks of Gaussian maximum inequalities.

pub mod lemmas;
pub mod regret;
pub mod theory;

pub use lemmas::{
    verify_max_ratio_lemma, verify_max_square_lemma, CovarianceMode, MomentEstimate, VarianceMode,
};
pub use regret::{
    best_so_far, cumulative_regret, simple_regret, simple_regret_at, RegretTrace, TraceEntry,
    REGRET_TOLERANCE,
};
pub use theory::{
    information_gain, rho_m_estimate, rsr_bound, rsr_bound_check, theory_report, RhoEstimate,
    TheoryReport, SIGMA_FLOOR,
};
