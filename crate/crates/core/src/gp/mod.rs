//! Gaussian-process kernels, exact posterior inference, fantasy conditioning
//! on pending batch points and joint posterior sampling over candidate sets.

pub mod fantasy;
pub mod kernel;
pub mod points;
pub mod posterior;
pub mod sampling;

pub use fantasy::{conditional_sigma, extend_fantasy, CandidateFantasy, FantasyState};
pub use kernel::{kernel_eval, KernelFamily, KernelSpec};
pub use points::{CandidateScheme, CandidateSet, DomainBox, Points};
pub use posterior::{fit_posterior, posterior_mean_var, CandidatePrediction, Dataset, PosteriorState};
pub use sampling::{argmax, sample_max, sample_posterior_joint, JointSampler, MaxDraw, PriorFactor};
